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

#include "xfed/xtuple.hpp"

#include <atomic>

namespace xfed {

namespace {
std::atomic<bool> g_validate{false};

// Separators outside the serialized-XML alphabet.
constexpr char kFieldSep = '\x1e';
constexpr char kRefSep = '\x1f';
}  // namespace

void set_validation_enabled(bool on) { g_validate.store(on); }
bool validation_enabled() { return g_validate.load(std::memory_order_relaxed); }

DataguidePtr make_guide(std::vector<Path> paths) {
  auto g = std::make_shared<Dataguide>();
  for (const auto& p : paths) {
    std::vector<std::string> steps;
    for (const auto& s : p.steps()) {
      steps.push_back(s);
      g->insert(Path(steps));
    }
  }
  return g;
}

DataguidePtr guide_union(const DataguidePtr& a, const DataguidePtr& b) {
  if (!a || a->empty()) return b;
  if (!b || b->empty()) return a;
  auto g = std::make_shared<Dataguide>(*a);
  g->insert(b->begin(), b->end());
  return g;
}

bool guide_is_prefix_closed(const Dataguide& g) {
  for (const auto& p : g)
    if (p.size() > 1 && !g.count(p.parent())) return false;
  return true;
}

std::optional<std::size_t> XRelation::attr_pos(const Path& p) const {
  for (std::size_t i = 0; i < schema.attributes.size(); ++i)
    if (schema.attributes[i] == p) return i;
  return std::nullopt;
}

std::string canonical_attr_value(const XRelationSchema& s, const XTuple& t,
                                 std::size_t attr_pos) {
  (void)s;
  std::string out;
  for (const NodeRef& r : t.bindings[attr_pos]) {
    out.push_back(kRefSep);
    t.forest[r.tree]->serialize(r.node, out);
  }
  return out;
}

std::string canonical_tuple_key(const XRelationSchema& s, const XTuple& t) {
  std::string out;
  for (std::size_t i = 0; i < s.attributes.size(); ++i) {
    out += s.attributes[i].text();
    out += canonical_attr_value(s, t, i);
    out.push_back(kFieldSep);
  }
  return out;
}

std::string canonical_forest(const XTuple& t) {
  std::string out;
  for (const auto& tree : t.forest) {
    tree->serialize(tree->root(), out);
  }
  return out;
}

std::vector<std::string> validate_tuple(const XRelationSchema& s, const XTuple& t) {
  std::vector<std::string> errs;
  if (t.bindings.size() != s.attributes.size()) {
    errs.push_back("bindings count differs from schema attributes");
    return errs;
  }
  if (s.guide && !guide_is_prefix_closed(*s.guide))
    errs.push_back("guide is not prefix-closed");
  for (std::size_t i = 0; i < s.attributes.size(); ++i) {
    const Path& attr = s.attributes[i];
    if (attr.has_joker()) errs.push_back("attribute has joker: " + attr.text());
    if (s.guide && !s.guide->count(attr)) {
      // Acceptable only when every proper prefix is in the guide.
      bool prefixes_ok = attr.size() > 1;
      Path p = attr;
      while (p.size() > 1) {
        p = p.parent();
        if (!s.guide->count(p)) {
          prefixes_ok = false;
          break;
        }
      }
      if (!prefixes_ok)
        errs.push_back("attribute outside guide: " + attr.text());
    }
    for (const NodeRef& r : t.bindings[i]) {
      if (r.tree >= t.forest.size()) {
        errs.push_back("ref tree out of range for " + attr.text());
        continue;
      }
      const XTree& tree = *t.forest[r.tree];
      if (r.node >= tree.node_count()) {
        errs.push_back("ref node out of range for " + attr.text());
        continue;
      }
      if (tree.path_of(r.node) != attr)
        errs.push_back("ref path mismatch for " + attr.text() + ": got " +
                       tree.path_of(r.node).text());
    }
  }
  if (s.guide) {
    for (const auto& tree : t.forest) {
      for (NodeId id : tree->preorder()) {
        Path p = tree->path_of(id);
        if (!s.guide->count(p)) {
          errs.push_back("forest path outside guide: " + p.text());
          break;  // one per tree is enough to localize
        }
      }
    }
  }
  return errs;
}

std::vector<std::string> validate_relation(const XRelation& r) {
  std::vector<std::string> errs;
  for (std::size_t i = 0; i < r.tuples.size(); ++i) {
    auto e = validate_tuple(r.schema, r.tuples[i]);
    for (auto& m : e) errs.push_back("tuple " + std::to_string(i) + ": " + m);
  }
  return errs;
}

}  // namespace xfed
