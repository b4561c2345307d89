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
#include <map>

#include "xfed/operators.hpp"

namespace xfed {

namespace {

// Exact arena copy: parents precede children in the arena, so replaying
// add_child in id order reproduces every id.
std::shared_ptr<XTree> clone_tree(const XTree& t) {
  auto out = std::make_shared<XTree>(t.node(0).label);
  out->set_text(0, t.node(0).text);
  for (NodeId id = 1; id < t.node_count(); ++id) {
    NodeId nid = out->add_child(t.node(id).parent, t.node(id).label);
    (void)nid;
    out->set_text(id, t.node(id).text);
  }
  return out;
}

// Copies the subtree of src rooted at sid under dst_parent, document order.
// Records every copied node in remap (keyed by src ids, valued as dst ids).
void graft_subtree(const XTree& src, NodeId sid, XTree& dst, NodeId dst_parent,
                   std::map<NodeId, NodeId>& remap) {
  NodeId nid = dst.add_child(dst_parent, src.node(sid).label);
  dst.set_text(nid, src.node(sid).text);
  remap[sid] = nid;
  for (NodeId c : src.node(sid).children) graft_subtree(src, c, dst, nid, remap);
}

bool is_leaf(const XTree& t, NodeId id) { return t.node(id).children.empty(); }

// Unifies rnode's children into lnode of dst (a clone of ltree, same ids).
// A right child folds into a left child only when its label occurs exactly
// once among the original children on both sides and the two agree in kind
// (both interior, or both leaves with equal text); otherwise it is appended.
void unify_children(const XTree& ltree, NodeId lnode, const XTree& rtree,
                    NodeId rnode, XTree& dst, std::map<NodeId, NodeId>& remap) {
  std::map<std::string, int> lcount, rcount;
  for (NodeId c : ltree.node(lnode).children) ++lcount[ltree.node(c).label];
  for (NodeId c : rtree.node(rnode).children) ++rcount[rtree.node(c).label];

  for (NodeId rc : rtree.node(rnode).children) {
    const std::string& label = rtree.node(rc).label;
    if (lcount[label] == 1 && rcount[label] == 1) {
      NodeId lc = kNoNode;
      for (NodeId c : ltree.node(lnode).children)
        if (ltree.node(c).label == label) lc = c;
      bool lleaf = is_leaf(ltree, lc), rleaf = is_leaf(rtree, rc);
      if (!lleaf && !rleaf) {
        remap[rc] = lc;
        unify_children(ltree, lc, rtree, rc, dst, remap);
        continue;
      }
      if (lleaf && rleaf && ltree.node(lc).text == rtree.node(rc).text) {
        remap[rc] = lc;
        continue;
      }
    }
    graft_subtree(rtree, rc, dst, lnode, remap);
  }
}

}  // namespace

XTuple merge_tuples(const XTuple& l, const XTuple& r) {
  std::map<std::string, int> lroots, rroots;
  for (const XTreePtr& t : l.forest) ++lroots[t->root_label()];
  for (const XTreePtr& t : r.forest) ++rroots[t->root_label()];

  XTuple out;
  out.forest = l.forest;
  std::map<NodeRef, NodeRef> rremap;

  for (std::uint32_t ri = 0; ri < r.forest.size(); ++ri) {
    const XTree& rt = *r.forest[ri];
    const std::string& label = rt.root_label();
    bool paired = lroots[label] == 1 && rroots[label] == 1;
    std::uint32_t li = 0;
    if (paired) {
      while (l.forest[li]->root_label() != label) ++li;
      const XTree& lt = *l.forest[li];
      bool lleaf = is_leaf(lt, 0), rleaf = is_leaf(rt, 0);
      // Roots of differing kind (or leaves with unequal text) cannot fold
      // without breaking the no-mixed-content invariant; fall through to a
      // plain append instead.
      if ((lleaf || rleaf) &&
          !(lleaf && rleaf && lt.node(0).text == rt.node(0).text))
        paired = false;
      if (paired) {
        std::map<NodeId, NodeId> nodemap;
        nodemap[0] = 0;
        if (lleaf && rleaf) {
          // Equal-text leaf roots: nothing to graft.
          out.forest[li] = l.forest[li];
        } else {
          auto merged = clone_tree(lt);
          unify_children(lt, 0, rt, 0, *merged, nodemap);
          out.forest[li] = XTreePtr(std::move(merged));
        }
        for (NodeId id = 0; id < rt.node_count(); ++id)
          if (nodemap.count(id)) rremap[{ri, id}] = {li, nodemap[id]};
        continue;
      }
    }
    auto nt = (std::uint32_t)out.forest.size();
    out.forest.push_back(r.forest[ri]);
    for (NodeId id = 0; id < rt.node_count(); ++id)
      rremap[{ri, id}] = {nt, id};
  }

  out.bindings = l.bindings;
  for (const auto& refs : r.bindings) {
    std::vector<NodeRef> mapped;
    mapped.reserve(refs.size());
    for (const NodeRef& ref : refs) mapped.push_back(rremap.at(ref));
    out.bindings.push_back(std::move(mapped));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ProductStream

ProductStream::ProductStream(TupleStreamPtr l, TupleStreamPtr r,
                             ProductMode mode)
    : left_(std::move(l)), right_(std::move(r)), mode_(mode) {
  schema_.attributes = left_->schema().attributes;
  for (const Path& p : right_->schema().attributes)
    schema_.attributes.push_back(p);
  schema_.guide = guide_union(left_->schema().guide, right_->schema().guide);
  // The pipelined variant promises no order even though the current
  // single-threaded schedule happens to emit left-major like nested loop.
  ordered_ = mode_ == ProductMode::NestedLoop && left_->ordered() &&
             right_->ordered();
}

std::optional<XTuple> ProductStream::next() {
  if (mode_ == ProductMode::NestedLoop && !inner_ready_) {
    // Blocking variant: the whole inner side is drawn before the first pair.
    while (auto t = right_->next()) inner_.push_back(std::move(*t));
    inner_ready_ = true;
  }
  for (;;) {
    if (!outer_cur_) {
      outer_cur_ = left_->next();
      if (!outer_cur_) return std::nullopt;
      inner_pos_ = 0;
    }
    if (inner_pos_ < inner_.size())
      return checked(merge_tuples(*outer_cur_, inner_[inner_pos_++]));
    if (!inner_ready_) {
      // Pipelined variant: the inner side is buffered as first traversed, so
      // the first pair appears after one tuple from each input.
      if (auto t = right_->next()) {
        inner_.push_back(std::move(*t));
        continue;
      }
      inner_ready_ = true;
    }
    outer_cur_.reset();
    if (inner_.empty()) {
      while (left_->next()) {
      }
      return std::nullopt;
    }
  }
}

// ---------------------------------------------------------------------------
// Join algorithms

const char* join_algo_name(JoinAlgo a) {
  switch (a) {
    case JoinAlgo::NestedLoop: return "nested-loop";
    case JoinAlgo::SortMerge: return "sort-merge";
    case JoinAlgo::Dependent: return "dependent";
  }
  return "?";
}

std::optional<JoinAlgo> join_algo_from(std::string_view name) {
  if (name == "nested-loop") return JoinAlgo::NestedLoop;
  if (name == "sort-merge") return JoinAlgo::SortMerge;
  if (name == "dependent") return JoinAlgo::Dependent;
  return std::nullopt;
}

namespace {

bool schema_has(const XRelationSchema& s, const Path& p) {
  for (const Path& a : s.attributes)
    if (a == p) return true;
  return false;
}

void collect_conjuncts(const Predicate& p, std::vector<const Predicate*>& out) {
  if (p.kind == Predicate::Kind::And) {
    for (const auto& k : p.children) collect_conjuncts(*k, out);
  } else {
    out.push_back(&p);
  }
}

}  // namespace

std::optional<EquiAtom> find_equi_atom(const Predicate& p,
                                       const XRelationSchema& ls,
                                       const XRelationSchema& rs) {
  std::vector<const Predicate*> atoms;
  collect_conjuncts(p, atoms);
  for (const Predicate* a : atoms) {
    if (a->kind != Predicate::Kind::CompareAttr || a->op != CmpOp::Eq) continue;
    bool a_l = schema_has(ls, a->attr), a_r = schema_has(rs, a->attr);
    bool b_l = schema_has(ls, a->attr2), b_r = schema_has(rs, a->attr2);
    if (a_l && !a_r && b_r && !b_l) return EquiAtom{a->attr, a->attr2};
    if (b_l && !b_r && a_r && !a_l) return EquiAtom{a->attr2, a->attr};
  }
  return std::nullopt;
}

JoinStream::JoinStream(TupleStreamPtr l, TupleStreamPtr r, PredicatePtr pred,
                       JoinAlgo algo, DiagnosticsPtr diag)
    : left_(std::move(l)), right_(std::move(r)), pred_(std::move(pred)),
      algo_(algo), diag_(std::move(diag)) {
  if (!pred_) pred_ = Predicate::always_true();
  schema_.attributes = left_->schema().attributes;
  for (const Path& p : right_->schema().attributes)
    schema_.attributes.push_back(p);
  schema_.guide = guide_union(left_->schema().guide, right_->schema().guide);
  for (const Path& p : pred_->mentioned_paths())
    if (!schema_has(schema_, p))
      throw PlanError("x_join: unknown attribute " + p.text());
  if (algo_ == JoinAlgo::Dependent)
    throw PlanError("x_join: dependent join needs an adapter-backed side");
  if (algo_ == JoinAlgo::SortMerge) {
    auto equi = find_equi_atom(*pred_, left_->schema(), right_->schema());
    if (!equi)
      throw PlanError("x_join: sort-merge needs an equality atom across sides");
    equi_ = *equi;
  }
  ordered_ = algo_ == JoinAlgo::SortMerge
                 ? true
                 : left_->ordered() && right_->ordered();
}

std::optional<XTuple> JoinStream::next() {
  return algo_ == JoinAlgo::SortMerge ? next_sort_merge() : next_nested_loop();
}

std::optional<XTuple> JoinStream::next_nested_loop() {
  if (!inner_ready_) {
    while (auto t = right_->next()) inner_.push_back(std::move(*t));
    inner_ready_ = true;
  }
  for (;;) {
    if (!outer_cur_) {
      outer_cur_ = left_->next();
      if (!outer_cur_) return std::nullopt;
      inner_pos_ = 0;
    }
    while (inner_pos_ < inner_.size()) {
      XTuple merged = merge_tuples(*outer_cur_, inner_[inner_pos_++]);
      if (eval_predicate(*pred_, schema_, merged, diag_.get()))
        return checked(std::move(merged));
    }
    outer_cur_.reset();
  }
}

namespace {

// Distinct key values one tuple contributes to a sorted run list. Values are
// canonicalized through Decimal so that textually different but numerically
// equal keys ("5.0", "05") land in the same run, matching compare_values.
std::vector<std::string> key_values(const XRelationSchema& s, const XTuple& t,
                                    const Path& attr) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.attributes.size(); ++i) {
    if (!(s.attributes[i] == attr)) continue;
    for (const NodeRef& r : t.bindings[i]) {
      std::string v = t.forest[r.tree]->string_value(r.node);
      if (auto d = Decimal::parse(v)) v = d->to_string();
      if (std::find(out.begin(), out.end(), v) == out.end())
        out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

void JoinStream::prepare_sort_merge() {
  while (auto t = left_->next()) lmat_.push_back(std::move(*t));
  while (auto t = right_->next()) rmat_.push_back(std::move(*t));
  for (std::size_t i = 0; i < lmat_.size(); ++i)
    for (std::string& v : key_values(left_->schema(), lmat_[i], equi_.left))
      lkeys_.push_back({std::move(v), i});
  for (std::size_t i = 0; i < rmat_.size(); ++i)
    for (std::string& v : key_values(right_->schema(), rmat_[i], equi_.right))
      rkeys_.push_back({std::move(v), i});
  auto by_key = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  };
  std::sort(lkeys_.begin(), lkeys_.end(), by_key);
  std::sort(rkeys_.begin(), rkeys_.end(), by_key);
  sm_ready_ = true;
}

std::optional<XTuple> JoinStream::next_sort_merge() {
  if (!sm_ready_) prepare_sort_merge();
  for (;;) {
    if (in_run_) {
      while (run_li_ < run_le_) {
        if (run_ri_ >= run_re_) {
          ++run_li_;
          run_ri_ = ri_;
          continue;
        }
        std::size_t lt = lkeys_[run_li_].second;
        std::size_t rt = rkeys_[run_ri_++].second;
        if (!sm_emitted_.insert({lt, rt}).second) continue;
        XTuple merged = merge_tuples(lmat_[lt], rmat_[rt]);
        if (eval_predicate(*pred_, schema_, merged, diag_.get()))
          return checked(std::move(merged));
      }
      in_run_ = false;
      li_ = run_le_;
      ri_ = run_re_;
    }
    if (li_ >= lkeys_.size() || ri_ >= rkeys_.size()) return std::nullopt;
    int c = lkeys_[li_].first.compare(rkeys_[ri_].first);
    if (c < 0) {
      ++li_;
      continue;
    }
    if (c > 0) {
      ++ri_;
      continue;
    }
    const std::string& key = lkeys_[li_].first;
    run_le_ = li_;
    while (run_le_ < lkeys_.size() && lkeys_[run_le_].first == key) ++run_le_;
    run_re_ = ri_;
    while (run_re_ < rkeys_.size() && rkeys_[run_re_].first == key) ++run_re_;
    run_li_ = li_;
    run_ri_ = ri_;
    in_run_ = true;
  }
}

// ---------------------------------------------------------------------------
// DependentJoinStream

DependentJoinStream::DependentJoinStream(TupleStreamPtr l,
                                         XRelationSchema right_schema,
                                         RightFactory fetch_right,
                                         EquiAtom equi, PredicatePtr pred,
                                         std::size_t batch_size,
                                         DiagnosticsPtr diag)
    : left_(std::move(l)), right_schema_(std::move(right_schema)),
      fetch_right_(std::move(fetch_right)), equi_(std::move(equi)),
      pred_(std::move(pred)), batch_size_(batch_size ? batch_size : 1),
      diag_(std::move(diag)) {
  if (!schema_has(left_->schema(), equi_.left))
    throw PlanError("dependent join: key " + equi_.left.text() +
                    " not on the outer side");
  if (!schema_has(right_schema_, equi_.right))
    throw PlanError("dependent join: key " + equi_.right.text() +
                    " not on the inner side");
  if (!pred_) pred_ = Predicate::cmp_attrs(equi_.left, CmpOp::Eq, equi_.right);
  schema_.attributes = left_->schema().attributes;
  for (const Path& p : right_schema_.attributes)
    schema_.attributes.push_back(p);
  schema_.guide = guide_union(left_->schema().guide, right_schema_.guide);
  ordered_ = false;
}

bool DependentJoinStream::fill_batch() {
  batch_left_.clear();
  batch_right_.clear();
  bl_ = br_ = 0;
  std::vector<std::string> keys;
  while (!left_done_ && keys.size() < batch_size_) {
    auto t = left_->next();
    if (!t) {
      left_done_ = true;
      break;
    }
    for (std::string& v : key_values(left_->schema(), *t, equi_.left))
      if (std::find(keys.begin(), keys.end(), v) == keys.end())
        keys.push_back(std::move(v));
    batch_left_.push_back(std::move(*t));
  }
  if (batch_left_.empty()) return false;
  if (!keys.empty()) {
    XRelation fetched = fetch_right_(keys);
    batch_right_ = std::move(fetched.tuples);
  }
  return true;
}

std::optional<XTuple> DependentJoinStream::next() {
  for (;;) {
    if (bl_ >= batch_left_.size()) {
      if (left_done_) return std::nullopt;
      if (!fill_batch()) return std::nullopt;
      continue;
    }
    while (br_ < batch_right_.size()) {
      XTuple merged = merge_tuples(batch_left_[bl_], batch_right_[br_++]);
      if (eval_predicate(*pred_, schema_, merged, diag_.get()))
        return checked(std::move(merged));
    }
    ++bl_;
    br_ = 0;
  }
}

// ---------------------------------------------------------------------------
// Materializing wrappers

XRelation x_product(const XRelation& l, const XRelation& r, ProductMode mode) {
  ProductStream s(std::make_unique<VectorTupleStream>(l),
                  std::make_unique<VectorTupleStream>(r), mode);
  return materialize(s);
}

XRelation x_join(const XRelation& l, const XRelation& r, PredicatePtr p,
                 JoinAlgo algo, DiagnosticsPtr diag) {
  JoinStream s(std::make_unique<VectorTupleStream>(l),
               std::make_unique<VectorTupleStream>(r), std::move(p), algo,
               std::move(diag));
  return materialize(s);
}

}  // namespace xfed
