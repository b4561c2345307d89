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

#ifndef XFED_PATH_HPP
#define XFED_PATH_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xfed {

// Rooted label path, e.g. "supplier/contact/phone". Steps are element names;
// a step may be the joker "*" (matches exactly one step) in query and catalog
// contexts. Paths bound in tuples must be joker-free.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<std::string> steps);

  // Parses "a/b/c". Throws std::invalid_argument on empty input or a step
  // that is neither "*" nor [A-Za-z_][A-Za-z0-9_-]*.
  static Path parse(std::string_view text);

  const std::vector<std::string>& steps() const { return steps_; }
  const std::string& text() const { return text_; }
  std::size_t size() const { return steps_.size(); }
  const std::string& root() const { return steps_.front(); }
  const std::string& leaf() const { return steps_.back(); }

  bool has_joker() const;

  // True if *this is a proper or improper prefix of other.
  bool is_prefix_of(const Path& other) const;

  // Parent path (all but the last step). Precondition: size() > 1.
  Path parent() const;

  // this with one more step appended.
  Path child(std::string_view step) const;

  // Replaces the root step (self-join aliasing).
  Path with_root(std::string_view new_root) const;

  // True when every step of *this equals the corresponding step of concrete
  // or is "*". Lengths must match.
  bool matches(const Path& concrete) const;

  bool operator==(const Path& o) const { return text_ == o.text_; }
  bool operator!=(const Path& o) const { return text_ != o.text_; }
  bool operator<(const Path& o) const { return text_ < o.text_; }

 private:
  std::vector<std::string> steps_;
  std::string text_;
};

bool is_valid_step(std::string_view step);

}  // namespace xfed

template <>
struct std::hash<xfed::Path> {
  std::size_t operator()(const xfed::Path& p) const noexcept {
    return std::hash<std::string>{}(p.text());
  }
};

#endif  // XFED_PATH_HPP
