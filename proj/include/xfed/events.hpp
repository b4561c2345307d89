// Copyright 2026 The xfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XFED_EVENTS_HPP
#define XFED_EVENTS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xfed {

// Parse-event vocabulary exchanged between adapters and the engine. A
// document is the event span up to the next Boundary and may contain several
// top-level elements (one tuple's forest). Boundary and End occur only at
// nesting depth zero; Error is terminal.
struct Event {
  enum class Kind { Open, Text, Close, Boundary, End, Error };
  Kind kind = Kind::End;
  std::string data;  // Open: label; Text: value; Error: diagnostic

  static Event open(std::string label) { return {Kind::Open, std::move(label)}; }
  static Event text(std::string value) { return {Kind::Text, std::move(value)}; }
  static Event close() { return {Kind::Close, {}}; }
  static Event boundary() { return {Kind::Boundary, {}}; }
  static Event end() { return {Kind::End, {}}; }
  static Event error(std::string diag) { return {Kind::Error, std::move(diag)}; }
};

// Pull stream of events. next() past End keeps returning End.
class EventStream {
 public:
  virtual ~EventStream() = default;
  virtual Event next() = 0;
};
using EventStreamPtr = std::unique_ptr<EventStream>;

class VectorEventStream : public EventStream {
 public:
  explicit VectorEventStream(std::vector<Event> events)
      : events_(std::move(events)) {}
  Event next() override {
    if (pos_ >= events_.size()) return Event::end();
    return events_[pos_++];
  }

 private:
  std::vector<Event> events_;
  std::size_t pos_ = 0;
};

// Counts data events flowing through (instrumentation for liveness checks).
class CountingEventStream : public EventStream {
 public:
  CountingEventStream(EventStreamPtr inner, std::shared_ptr<std::uint64_t> counter)
      : inner_(std::move(inner)), counter_(std::move(counter)) {}
  Event next() override {
    Event e = inner_->next();
    if (e.kind != Event::Kind::End) ++*counter_;
    return e;
  }

 private:
  EventStreamPtr inner_;
  std::shared_ptr<std::uint64_t> counter_;
};

}  // namespace xfed

#endif  // XFED_EVENTS_HPP
