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

#ifndef XFED_XTREE_HPP
#define XFED_XTREE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "xfed/path.hpp"

namespace xfed {

using NodeId = std::uint32_t;
constexpr NodeId kNoNode = 0xffffffffu;

// Ordered labeled tree. Nodes live in an arena indexed by NodeId; node 0 is
// the root. Trees are immutable once built and shared between tuples.
class XTree {
 public:
  struct Node {
    std::string label;
    std::string text;  // non-empty only on leaves
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
  };

  explicit XTree(std::string root_label);

  NodeId add_child(NodeId parent, std::string label);
  void set_text(NodeId node, std::string text);

  const Node& node(NodeId id) const { return nodes_[id]; }
  NodeId root() const { return 0; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::string& root_label() const { return nodes_[0].label; }

  // Root-to-node label path.
  Path path_of(NodeId id) const;

  // All nodes whose root-to-node path equals p, in document order.
  std::vector<NodeId> find(const Path& p) const;

  // Document-order (pre-order) node ids.
  std::vector<NodeId> preorder() const;

  // Concatenated leaf text of the subtree, document order (string value).
  std::string string_value(NodeId id) const;

  // Canonical XML text of the subtree rooted at id: elements only, schema
  // document order, no insignificant whitespace, &<> escaped.
  void serialize(NodeId id, std::string& out) const;
  std::string serialize() const;

 private:
  std::vector<Node> nodes_;
};

using XTreePtr = std::shared_ptr<const XTree>;

// Reference to one node of one tree in a tuple's forest.
struct NodeRef {
  std::uint32_t tree = 0;
  NodeId node = 0;
  bool operator==(const NodeRef& o) const { return tree == o.tree && node == o.node; }
  bool operator<(const NodeRef& o) const {
    return tree != o.tree ? tree < o.tree : node < o.node;
  }
};

void append_escaped(std::string_view raw, std::string& out);
std::string escape_text(std::string_view raw);

}  // namespace xfed

#endif  // XFED_XTREE_HPP
