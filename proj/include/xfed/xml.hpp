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

#ifndef XFED_XML_HPP
#define XFED_XML_HPP

#include <string>
#include <string_view>
#include <vector>

#include "xfed/events.hpp"
#include "xfed/xtree.hpp"

namespace xfed {

// Streaming reader for the element-only XML subset the engine exchanges:
// no attributes, namespaces, processing instructions or mixed content.
// Attributes inside a start tag are skipped; comments and an XML prologue
// are tolerated. Each top-level element is followed by a Boundary event;
// malformed input yields an Error event.
class XmlEventStream : public EventStream {
 public:
  explicit XmlEventStream(std::string content);
  Event next() override;

 private:
  Event lex();

  std::string content_;
  std::size_t pos_ = 0;
  std::vector<std::string> open_;
  bool done_ = false;
  bool pending_boundary_ = false;
  bool pending_close_ = false;
};

std::string xml_unescape(std::string_view raw);  // throws StreamError on bad entity

// Builds trees from one document's events (everything up to a Boundary).
// Used by tests and adapters; the engine-side builder lives in x_source.
std::vector<XTreePtr> parse_document(std::string_view text);

// Serializes a tree back to canonical text (delegates to XTree::serialize).
std::string serialize_forest(const std::vector<XTreePtr>& forest);

}  // namespace xfed

#endif  // XFED_XML_HPP
