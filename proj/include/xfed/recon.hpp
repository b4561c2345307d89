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

#ifndef XFED_RECON_HPP
#define XFED_RECON_HPP

#include <memory>
#include <string>
#include <vector>

#include "xfed/events.hpp"
#include "xfed/operators.hpp"

namespace xfed {

// Output template. Placeholders expand per referenced node to the node's
// content (leaf text, or the serialized children of an interior node); an
// element whose content is exactly one placeholder repeats per ref and is
// omitted when no ref is bound. Scopes iterate nest-group members at the
// given depth, correlating attributes that were grouped together.
struct TemplateItem;
using TemplateItemPtr = std::shared_ptr<const TemplateItem>;

struct TemplateItem {
  enum class Kind { Element, Text, Placeholder, Scope };
  Kind kind = Kind::Text;
  std::string text;  // Element: tag; Text: literal content
  Path path;         // Placeholder
  int level = 0;     // Scope depth, 1-based
  std::vector<TemplateItemPtr> children;

  static TemplateItemPtr element(std::string tag,
                                 std::vector<TemplateItemPtr> kids);
  static TemplateItemPtr literal(std::string value);
  static TemplateItemPtr placeholder(Path p);
  static TemplateItemPtr scope(int level, std::vector<TemplateItemPtr> kids);
};

struct ReconTemplate {
  std::vector<TemplateItemPtr> items;
  bool forest_mode = false;  // serialize each tuple's whole forest instead

  // One-line text form used in canonical query printouts (scope markers are
  // not rendered; placeholders appear as {path}).
  std::string render() const;

  std::vector<Path> placeholder_paths() const;
};

// Emits one document per input tuple (a Boundary after each).
class ReconstructEventStream : public EventStream {
 public:
  ReconstructEventStream(TupleStreamPtr child, ReconTemplate tpl);
  Event next() override;

 private:
  void instantiate(const XTuple& t);

  TupleStreamPtr child_;
  ReconTemplate tpl_;
  std::vector<Event> buf_;
  std::size_t buf_pos_ = 0;
  bool done_ = false;
};

// Materializing helper: serialized document text per input tuple.
std::vector<std::string> x_reconstruct(const XRelation& r,
                                       const ReconTemplate& tpl);

// Drains an event stream into serialized documents (one string each).
std::vector<std::string> drain_documents(EventStream& s);

}  // namespace xfed

#endif  // XFED_RECON_HPP
