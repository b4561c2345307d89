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

#include <algorithm>

#include "forest_ops.hpp"
#include "xfed/operators.hpp"

namespace xfed {

XTuple TupleStream::checked(XTuple t) const {
  if (validation_enabled()) {
    auto errs = validate_tuple(schema_, t);
    if (!errs.empty()) throw ValidationError(errs.front());
  }
  return t;
}

XRelation materialize(TupleStream& s) {
  XRelation r;
  r.schema = s.schema();
  while (auto t = s.next()) r.tuples.push_back(std::move(*t));
  r.ordered = s.ordered();
  return r;
}

VectorTupleStream::VectorTupleStream(XRelation rel) : rel_(std::move(rel)) {
  schema_ = rel_.schema;
  ordered_ = rel_.ordered;
}

std::optional<XTuple> VectorTupleStream::next() {
  if (pos_ >= rel_.tuples.size()) return std::nullopt;
  return rel_.tuples[pos_++];
}

namespace detail {

PruneResult prune_forest(const std::vector<XTreePtr>& forest,
                         const std::vector<NodeRef>& keep) {
  PruneResult out;
  std::vector<std::vector<NodeRef>> per_tree(forest.size());
  for (const NodeRef& r : keep) per_tree[r.tree].push_back(r);

  for (std::uint32_t ti = 0; ti < forest.size(); ++ti) {
    if (per_tree[ti].empty()) continue;
    const XTree& t = *forest[ti];
    std::vector<char> mark(t.node_count(), 0);
    for (const NodeRef& r : per_tree[ti]) {
      // Subtree of the ref.
      std::vector<NodeId> stack{r.node};
      while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (mark[id]) continue;
        mark[id] = 1;
        for (NodeId c : t.node(id).children) stack.push_back(c);
      }
      // Ancestor spine.
      for (NodeId cur = t.node(r.node).parent; cur != kNoNode;
           cur = t.node(cur).parent)
        mark[cur] = 1;
    }
    std::uint32_t new_tree = (std::uint32_t)out.forest.size();
    bool all = std::all_of(mark.begin(), mark.end(), [](char c) { return c; });
    if (all) {
      out.forest.push_back(forest[ti]);
      for (NodeId id = 0; id < t.node_count(); ++id)
        out.remap[{ti, id}] = {new_tree, id};
      continue;
    }
    auto copy = std::make_shared<XTree>(t.node(0).label);
    copy->set_text(0, t.node(0).text);
    out.remap[{ti, 0}] = {new_tree, 0};
    // BFS copy preserving child order.
    std::vector<std::pair<NodeId, NodeId>> work{{0, 0}};  // (old, new)
    for (std::size_t w = 0; w < work.size(); ++w) {
      auto [oid, nid] = work[w];
      for (NodeId c : t.node(oid).children) {
        if (!mark[c]) continue;
        NodeId nc = copy->add_child(nid, t.node(c).label);
        copy->set_text(nc, t.node(c).text);
        out.remap[{ti, c}] = {new_tree, nc};
        work.push_back({c, nc});
      }
    }
    out.forest.push_back(XTreePtr(std::move(copy)));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SourceStream

SourceStream::SourceStream(EventStreamPtr events, DataguidePtr guide,
                           std::vector<Path> attrs, DiagnosticsPtr diag,
                           std::optional<RootRename> rename)
    : events_(std::move(events)), diag_(std::move(diag)),
      rename_(std::move(rename)) {
  schema_.attributes = std::move(attrs);
  schema_.guide = guide ? guide : std::make_shared<Dataguide>();
  for (const Path& p : *schema_.guide)
    if (p.size() == 1) guide_roots_.push_back(p.root());
  ordered_ = true;  // arrival order
}

std::optional<XTuple> SourceStream::next() {
  if (done_) return std::nullopt;
  for (;;) {
    std::vector<XTreePtr> forest;
    std::shared_ptr<XTree> cur;
    std::vector<NodeId> stack;
    std::vector<Path> path_stack;
    int skip_depth = 0;       // >0: inside an off-guide branch
    bool skip_doc = false;    // current document has an unknown root

    for (;;) {
      Event e = events_->next();
      switch (e.kind) {
        case Event::Kind::Open: {
          if (skip_depth > 0 || skip_doc) {
            ++skip_depth;
            break;
          }
          std::string label = e.data;
          if (!cur) {
            if (rename_ && label == rename_->from) label = rename_->to;
            if (std::find(guide_roots_.begin(), guide_roots_.end(), label) ==
                guide_roots_.end()) {
              if (diag_) ++diag_->docs_skipped_unknown_root;
              skip_doc = true;
              ++skip_depth;
              break;
            }
            cur = std::make_shared<XTree>(label);
            stack = {cur->root()};
            path_stack = {Path({label})};
            break;
          }
          Path child_path = path_stack.back().child(label);
          if (!schema_.guide->count(child_path)) {
            if (diag_) ++diag_->branches_pruned_off_guide;
            ++skip_depth;
            break;
          }
          stack.push_back(cur->add_child(stack.back(), label));
          path_stack.push_back(std::move(child_path));
          break;
        }
        case Event::Kind::Text:
          if (skip_depth > 0) break;
          if (!cur || stack.empty())
            throw StreamError("source: text outside element");
          cur->set_text(stack.back(), cur->node(stack.back()).text + e.data);
          break;
        case Event::Kind::Close:
          if (skip_depth > 0) {
            --skip_depth;
            break;
          }
          if (!cur || stack.empty())
            throw StreamError("source: unbalanced close");
          if (!cur->node(stack.back()).text.empty() &&
              !cur->node(stack.back()).children.empty())
            throw StreamError("source: mixed content at " +
                              path_stack.back().text());
          stack.pop_back();
          path_stack.pop_back();
          if (stack.empty()) {
            forest.push_back(cur);
            cur.reset();
          }
          break;
        case Event::Kind::Boundary: {
          if (!stack.empty()) throw StreamError("source: boundary inside element");
          if (skip_doc) {
            skip_doc = false;
            skip_depth = 0;
            forest.clear();
            break;  // try the next document
          }
          if (forest.empty()) break;  // stray boundary
          goto emit;
        }
        case Event::Kind::End:
          done_ = true;
          if (!stack.empty()) throw StreamError("source: truncated document");
          if (!forest.empty() && !skip_doc) goto emit;
          return std::nullopt;
        case Event::Kind::Error:
          done_ = true;
          throw StreamError(e.data);
      }
    }

  emit : {
    XTuple t;
    t.forest = std::move(forest);
    t.bindings.resize(schema_.attributes.size());
    for (std::size_t i = 0; i < schema_.attributes.size(); ++i) {
      const Path& attr = schema_.attributes[i];
      for (std::uint32_t ti = 0; ti < t.forest.size(); ++ti)
        for (NodeId id : t.forest[ti]->find(attr))
          t.bindings[i].push_back({ti, id});
    }
    return checked(std::move(t));
  }
  }
}

// ---------------------------------------------------------------------------
// ProjectStream

ProjectStream::ProjectStream(TupleStreamPtr child, std::vector<Path> keep)
    : child_(std::move(child)), keep_(std::move(keep)) {
  for (const Path& k : keep_) {
    bool found = false;
    for (const Path& a : child_->schema().attributes)
      if (a == k) {
        found = true;
        break;
      }
    if (!found) throw PlanError("x_project: unknown attribute " + k.text());
  }
  schema_.attributes = keep_;
  schema_.guide = child_->schema().guide;
  ordered_ = child_->ordered();
}

std::optional<XTuple> ProjectStream::next() {
  auto in = child_->next();
  if (!in) return std::nullopt;
  const auto& cattrs = child_->schema().attributes;

  // Per keep path: refs across every binding of that path, deduped.
  std::vector<std::vector<NodeRef>> kept(keep_.size());
  std::vector<NodeRef> all;
  for (std::size_t i = 0; i < keep_.size(); ++i) {
    std::set<NodeRef> seen;
    for (std::size_t j = 0; j < cattrs.size(); ++j) {
      if (!(cattrs[j] == keep_[i])) continue;
      for (const NodeRef& r : in->bindings[j])
        if (seen.insert(r).second) kept[i].push_back(r);
    }
    all.insert(all.end(), kept[i].begin(), kept[i].end());
  }

  auto pruned = detail::prune_forest(in->forest, all);
  XTuple out;
  out.forest = std::move(pruned.forest);
  out.bindings.resize(keep_.size());
  for (std::size_t i = 0; i < keep_.size(); ++i)
    for (const NodeRef& r : kept[i])
      out.bindings[i].push_back(pruned.remap.at(r));
  return checked(std::move(out));
}

// ---------------------------------------------------------------------------
// RestrictStream

RestrictStream::RestrictStream(TupleStreamPtr child, PredicatePtr pred,
                               DiagnosticsPtr diag)
    : child_(std::move(child)), pred_(std::move(pred)), diag_(std::move(diag)) {
  for (const Path& p : pred_->mentioned_paths()) {
    bool found = false;
    for (const Path& a : child_->schema().attributes)
      if (a == p) {
        found = true;
        break;
      }
    if (!found) throw PlanError("x_restrict: unknown attribute " + p.text());
  }
  schema_ = child_->schema();
  ordered_ = child_->ordered();
}

std::optional<XTuple> RestrictStream::next() {
  while (auto t = child_->next()) {
    if (eval_predicate(*pred_, schema_, *t, diag_.get()))
      return checked(std::move(*t));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Materializing wrappers

XRelation x_source(EventStreamPtr events, DataguidePtr guide,
                   std::vector<Path> attrs, DiagnosticsPtr diag) {
  SourceStream s(std::move(events), std::move(guide), std::move(attrs),
                 std::move(diag));
  return materialize(s);
}

XRelation x_project(const XRelation& r, std::vector<Path> keep) {
  ProjectStream s(std::make_unique<VectorTupleStream>(r), std::move(keep));
  return materialize(s);
}

XRelation x_restrict(const XRelation& r, PredicatePtr p, DiagnosticsPtr diag) {
  RestrictStream s(std::make_unique<VectorTupleStream>(r), std::move(p),
                   std::move(diag));
  return materialize(s);
}

}  // namespace xfed
