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

#include "xfed/xtree.hpp"

#include <stdexcept>

namespace xfed {

XTree::XTree(std::string root_label) {
  Node n;
  n.label = std::move(root_label);
  nodes_.push_back(std::move(n));
}

NodeId XTree::add_child(NodeId parent, std::string label) {
  if (parent >= nodes_.size()) throw std::out_of_range("xtree: bad parent");
  NodeId id = (NodeId)nodes_.size();
  Node n;
  n.label = std::move(label);
  n.parent = parent;
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(id);
  return id;
}

void XTree::set_text(NodeId node, std::string text) {
  nodes_.at(node).text = std::move(text);
}

Path XTree::path_of(NodeId id) const {
  std::vector<std::string> steps;
  for (NodeId cur = id; cur != kNoNode; cur = nodes_[cur].parent)
    steps.push_back(nodes_[cur].label);
  return Path(std::vector<std::string>(steps.rbegin(), steps.rend()));
}

std::vector<NodeId> XTree::preorder() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  std::vector<NodeId> stack{root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const auto& ch = nodes_[id].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> XTree::find(const Path& p) const {
  std::vector<NodeId> frontier;
  if (nodes_[0].label != p.steps()[0]) return {};
  frontier.push_back(0);
  for (std::size_t depth = 1; depth < p.size(); ++depth) {
    std::vector<NodeId> next;
    for (NodeId id : frontier)
      for (NodeId c : nodes_[id].children)
        if (nodes_[c].label == p.steps()[depth]) next.push_back(c);
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

std::string XTree::string_value(NodeId id) const {
  std::string out;
  std::vector<NodeId> stack{id};
  // Manual stack keeps document order: children pushed in reverse.
  std::vector<NodeId> order;
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    order.push_back(cur);
    const auto& ch = nodes_[cur].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (NodeId cur : order) out += nodes_[cur].text;
  return out;
}

void append_escaped(std::string_view raw, std::string& out) {
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
}

std::string escape_text(std::string_view raw) {
  std::string out;
  append_escaped(raw, out);
  return out;
}

void XTree::serialize(NodeId id, std::string& out) const {
  const Node& n = nodes_[id];
  out.push_back('<');
  out += n.label;
  out.push_back('>');
  if (!n.text.empty()) append_escaped(n.text, out);
  for (NodeId c : n.children) serialize(c, out);
  out += "</";
  out += n.label;
  out.push_back('>');
}

std::string XTree::serialize() const {
  std::string out;
  serialize(root(), out);
  return out;
}

}  // namespace xfed
