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

#include "forest_ops.hpp"
#include "xfed/decimal.hpp"
#include "xfed/operators.hpp"

namespace xfed {

// ---------------------------------------------------------------------------
// SortStream

namespace {

// Sort rank of one attribute value: absent first, then decimal-parsable
// values in numeric order, then everything else bytewise.
struct SortVal {
  int cls;  // 0 absent, 1 decimal, 2 text
  Decimal dec;
  std::string text;

  static SortVal of(const XTuple& t, const std::vector<NodeRef>& refs) {
    if (refs.empty()) return {0, {}, {}};
    std::string v = t.forest[refs[0].tree]->string_value(refs[0].node);
    if (auto d = Decimal::parse(v)) return {1, *d, std::move(v)};
    return {2, {}, std::move(v)};
  }

  int compare(const SortVal& o) const {
    if (cls != o.cls) return cls < o.cls ? -1 : 1;
    if (cls == 1) return dec.compare(o.dec);
    int c = text.compare(o.text);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
};

}  // namespace

SortStream::SortStream(TupleStreamPtr child, std::vector<SortKey> keys)
    : child_(std::move(child)), keys_(std::move(keys)) {
  schema_ = child_->schema();
  for (const SortKey& k : keys_) {
    bool found = false;
    for (const Path& a : schema_.attributes)
      if (a == k.attr) {
        found = true;
        break;
      }
    if (!found) throw PlanError("x_sort: unknown attribute " + k.attr.text());
  }
  ordered_ = true;
}

std::optional<XTuple> SortStream::next() {
  if (!ready_) {
    sorted_ = {};
    while (auto t = child_->next()) sorted_.push_back(std::move(*t));
    std::vector<std::size_t> key_pos;
    for (const SortKey& k : keys_)
      for (std::size_t i = 0; i < schema_.attributes.size(); ++i)
        if (schema_.attributes[i] == k.attr) {
          key_pos.push_back(i);
          break;
        }
    std::vector<std::vector<SortVal>> vals(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i)
      for (std::size_t kp : key_pos)
        vals[i].push_back(SortVal::of(sorted_[i], sorted_[i].bindings[kp]));
    std::vector<std::size_t> order(sorted_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       for (std::size_t k = 0; k < keys_.size(); ++k) {
                         int c = vals[a][k].compare(vals[b][k]);
                         if (keys_[k].desc) c = -c;
                         if (c != 0) return c < 0;
                       }
                       return false;
                     });
    std::vector<XTuple> rearranged;
    rearranged.reserve(sorted_.size());
    for (std::size_t i : order) rearranged.push_back(std::move(sorted_[i]));
    sorted_ = std::move(rearranged);
    ready_ = true;
  }
  if (pos_ >= sorted_.size()) return std::nullopt;
  return sorted_[pos_++];
}

// ---------------------------------------------------------------------------
// NestStream

NestStream::NestStream(TupleStreamPtr child, std::vector<Path> group_by)
    : child_(std::move(child)), group_by_(std::move(group_by)) {
  schema_ = child_->schema();
  for (const Path& g : group_by_) {
    bool found = false;
    for (const Path& a : schema_.attributes)
      if (a == g) {
        found = true;
        break;
      }
    if (!found) throw PlanError("x_nest: unknown attribute " + g.text());
  }
  is_group_pos_.resize(schema_.attributes.size(), false);
  for (std::size_t i = 0; i < schema_.attributes.size(); ++i)
    for (const Path& g : group_by_)
      if (schema_.attributes[i] == g) is_group_pos_[i] = true;
  ordered_ = true;  // group key order
}

namespace {

// Shifts every range of a shape tree by the per-position offsets; positions
// flagged as group positions of the enclosing nest are overridden later.
NestShapePtr shift_shape(const NestShape& in,
                         const std::vector<std::uint32_t>& offset) {
  auto out = std::make_shared<NestShape>();
  for (const NestShape::Member& m : in.members) {
    NestShape::Member nm;
    std::size_t n = std::min(m.ranges.size(), offset.size());
    nm.ranges.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      nm.ranges.push_back(
          {m.ranges[i].first + offset[i], m.ranges[i].second + offset[i]});
    if (m.child) nm.child = shift_shape(*m.child, offset);
    out->members.push_back(std::move(nm));
  }
  return out;
}

void override_group_ranges(NestShape& s, const std::vector<bool>& is_group,
                           const std::vector<std::uint32_t>& group_len) {
  for (NestShape::Member& m : s.members) {
    for (std::size_t i = 0; i < m.ranges.size(); ++i)
      if (is_group[i]) m.ranges[i] = {0, group_len[i]};
    if (m.child) {
      auto child = std::make_shared<NestShape>(*m.child);
      override_group_ranges(*child, is_group, group_len);
      m.child = child;
    }
  }
}

}  // namespace

XTuple NestStream::merge_group(std::vector<XTuple>&& members) const {
  const std::size_t nattr = schema_.attributes.size();
  XTuple out;
  out.bindings.resize(nattr);
  auto shape = std::make_shared<NestShape>();

  // Canonical text of output trees already present, for unification.
  std::vector<std::string> tree_canon;
  std::vector<std::vector<NodeId>> tree_pre;  // preorder ids per output tree

  auto append_tree = [&](const XTreePtr& t) {
    out.forest.push_back(t);
    tree_canon.push_back(t->serialize());
    tree_pre.push_back(t->preorder());
    return (std::uint32_t)(out.forest.size() - 1);
  };

  for (XTuple& m : members) {
    // Which of the member's trees bear a group ref.
    std::vector<bool> bears(m.forest.size(), false);
    for (std::size_t i = 0; i < nattr; ++i)
      if (is_group_pos_[i])
        for (const NodeRef& r : m.bindings[i]) bears[r.tree] = true;

    // Tree remap: unify canonically identical group-bearing trees, append
    // everything else.
    std::vector<std::uint32_t> tmap(m.forest.size());
    std::vector<const std::vector<NodeId>*> donor_pre(m.forest.size(), nullptr);
    std::vector<std::vector<NodeId>> donor_pre_store(m.forest.size());
    for (std::uint32_t ti = 0; ti < m.forest.size(); ++ti) {
      if (bears[ti]) {
        std::string canon = m.forest[ti]->serialize();
        std::uint32_t hit = kNoNode;
        for (std::uint32_t oi = 0; oi < out.forest.size(); ++oi)
          if (tree_canon[oi] == canon) {
            hit = oi;
            break;
          }
        if (hit != kNoNode) {
          tmap[ti] = hit;
          donor_pre_store[ti] = m.forest[ti]->preorder();
          donor_pre[ti] = &donor_pre_store[ti];
          continue;
        }
      }
      tmap[ti] = append_tree(m.forest[ti]);
    }

    // Ref remap. Unified trees map node-to-node by preorder position, which
    // canonical equality makes structurally sound.
    auto map_ref = [&](const NodeRef& r) -> NodeRef {
      std::uint32_t nt = tmap[r.tree];
      if (!donor_pre[r.tree]) return {nt, r.node};
      const std::vector<NodeId>& dp = *donor_pre[r.tree];
      std::size_t pos =
          std::find(dp.begin(), dp.end(), r.node) - dp.begin();
      return {nt, tree_pre[nt][pos]};
    };

    NestShape::Member member;
    member.ranges.resize(nattr);
    std::vector<std::uint32_t> offsets(nattr, 0);
    bool first_member = shape->members.empty();
    for (std::size_t i = 0; i < nattr; ++i) {
      auto& dst = out.bindings[i];
      offsets[i] = (std::uint32_t)dst.size();
      std::uint32_t begin = offsets[i];
      // The first member's binding is the group representative at key
      // positions; later members are canonically equal there by
      // construction and contribute nothing.
      if (!is_group_pos_[i] || first_member)
        for (const NodeRef& r : m.bindings[i]) dst.push_back(map_ref(r));
      member.ranges[i] = {begin, (std::uint32_t)dst.size()};
    }
    if (m.shape) member.child = shift_shape(*m.shape, offsets);
    shape->members.push_back(std::move(member));
  }

  // Group positions hold one shared value list; every member sees all of it.
  std::vector<std::uint32_t> group_len(nattr, 0);
  for (std::size_t i = 0; i < nattr; ++i)
    group_len[i] = (std::uint32_t)out.bindings[i].size();
  override_group_ranges(*shape, is_group_pos_,
                        group_len);
  out.shape = shape;
  return out;
}

std::optional<XTuple> NestStream::next() {
  if (!ready_) {
    std::vector<std::size_t> group_pos;
    for (std::size_t i = 0; i < schema_.attributes.size(); ++i)
      if (is_group_pos_[i]) group_pos.push_back(i);
    std::map<std::string, std::vector<XTuple>> groups;
    while (auto t = child_->next()) {
      std::string key;
      for (std::size_t i : group_pos) {
        key += canonical_attr_value(schema_, *t, i);
        key += '\x1e';
      }
      groups[std::move(key)].push_back(std::move(*t));
    }
    for (auto& [key, members] : groups)
      out_.push_back(checked(merge_group(std::move(members))));
    ready_ = true;
  }
  if (pos_ >= out_.size()) return std::nullopt;
  return out_[pos_++];
}

// ---------------------------------------------------------------------------
// UnnestStream

UnnestStream::UnnestStream(TupleStreamPtr child, Path multi,
                           std::vector<Path> pivots)
    : child_(std::move(child)), multi_(std::move(multi)),
      pivots_(std::move(pivots)) {
  const auto& cattrs = child_->schema().attributes;
  auto has = [&](const Path& p) {
    return std::find(cattrs.begin(), cattrs.end(), p) != cattrs.end();
  };
  if (!has(multi_))
    throw PlanError("x_unnest: unknown attribute " + multi_.text());
  for (const Path& p : pivots_)
    if (!has(p)) throw PlanError("x_unnest: unknown attribute " + p.text());
  schema_.attributes = pivots_;
  schema_.attributes.push_back(multi_);
  schema_.guide = child_->schema().guide;
  ordered_ = child_->ordered();
}

std::optional<XTuple> UnnestStream::next() {
  const auto& cattrs = child_->schema().attributes;
  auto first_pos = [&](const Path& p) {
    return (std::size_t)(std::find(cattrs.begin(), cattrs.end(), p) -
                         cattrs.begin());
  };
  for (;;) {
    if (!cur_) {
      cur_ = child_->next();
      if (!cur_) return std::nullopt;
      ref_pos_ = 0;
    }
    const auto& multi_refs = cur_->bindings[first_pos(multi_)];
    if (ref_pos_ >= multi_refs.size()) {
      cur_.reset();
      continue;
    }
    NodeRef mref = multi_refs[ref_pos_++];

    std::vector<std::vector<NodeRef>> kept(pivots_.size());
    std::vector<NodeRef> all;
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
      kept[i] = cur_->bindings[first_pos(pivots_[i])];
      all.insert(all.end(), kept[i].begin(), kept[i].end());
    }
    all.push_back(mref);

    auto pruned = detail::prune_forest(cur_->forest, all);
    XTuple out;
    out.forest = std::move(pruned.forest);
    out.bindings.resize(pivots_.size() + 1);
    for (std::size_t i = 0; i < pivots_.size(); ++i)
      for (const NodeRef& r : kept[i])
        out.bindings[i].push_back(pruned.remap.at(r));
    out.bindings.back().push_back(pruned.remap.at(mref));
    return checked(std::move(out));
  }
}

// ---------------------------------------------------------------------------
// AggregateStream

const char* agg_fn_name(AggFn f) {
  switch (f) {
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Count: return "count";
    case AggFn::Avg: return "avg";
    case AggFn::Sum: return "sum";
  }
  return "?";
}

std::optional<AggFn> agg_fn_from(std::string_view name) {
  if (name == "min") return AggFn::Min;
  if (name == "max") return AggFn::Max;
  if (name == "count") return AggFn::Count;
  if (name == "avg") return AggFn::Avg;
  if (name == "sum") return AggFn::Sum;
  return std::nullopt;
}

AggregateStream::AggregateStream(TupleStreamPtr child, AggFn fn, Path attr,
                                 Path out, DiagnosticsPtr diag)
    : child_(std::move(child)), fn_(fn), attr_(std::move(attr)),
      out_(std::move(out)), diag_(std::move(diag)) {
  const auto& cattrs = child_->schema().attributes;
  if (std::find(cattrs.begin(), cattrs.end(), attr_) == cattrs.end())
    throw PlanError("x_aggregate: unknown attribute " + attr_.text());
  if (std::find(cattrs.begin(), cattrs.end(), out_) != cattrs.end())
    throw PlanError("x_aggregate: output attribute " + out_.text() +
                    " already present");
  schema_.attributes = cattrs;
  schema_.attributes.push_back(out_);
  schema_.guide = guide_union(child_->schema().guide, make_guide({out_}));
  ordered_ = false;  // aggregation makes no order promise
}

std::optional<XTuple> AggregateStream::next() {
  auto in = child_->next();
  if (!in) return std::nullopt;
  const auto& cattrs = child_->schema().attributes;
  std::size_t apos =
      std::find(cattrs.begin(), cattrs.end(), attr_) - cattrs.begin();

  std::optional<std::string> result;
  if (fn_ == AggFn::Count) {
    result = Decimal::from_int((long long)in->bindings[apos].size()).to_string();
  } else {
    std::vector<Decimal> vals;
    bool ok = true;
    for (const NodeRef& r : in->bindings[apos]) {
      auto d = Decimal::parse(in->forest[r.tree]->string_value(r.node));
      if (!d) {
        ok = false;
        break;
      }
      vals.push_back(*d);
    }
    if (ok && !vals.empty()) {
      Decimal acc = vals[0];
      switch (fn_) {
        case AggFn::Min:
          for (const Decimal& d : vals)
            if (d.compare(acc) < 0) acc = d;
          break;
        case AggFn::Max:
          for (const Decimal& d : vals)
            if (d.compare(acc) > 0) acc = d;
          break;
        case AggFn::Sum:
        case AggFn::Avg:
          acc = Decimal();
          for (const Decimal& d : vals) acc = acc.plus(d);
          if (fn_ == AggFn::Avg)
            acc = acc.divided_by(Decimal::from_int((long long)vals.size()));
          break;
        case AggFn::Count: break;
      }
      result = acc.to_string();
    } else {
      if (diag_) ++diag_->aggregate_input_failures;
    }
  }

  XTuple out = std::move(*in);
  out.bindings.emplace_back();
  if (result) {
    auto t = std::make_shared<XTree>(out_.root());
    NodeId leaf = 0;
    for (std::size_t i = 1; i < out_.size(); ++i)
      leaf = t->add_child(leaf, out_.steps()[i]);
    t->set_text(leaf, *result);
    out.forest.push_back(XTreePtr(std::move(t)));
    out.bindings.back().push_back({(std::uint32_t)(out.forest.size() - 1), leaf});
  }
  out.shape = nullptr;  // ranges no longer line up once a column is added
  return checked(std::move(out));
}

// ---------------------------------------------------------------------------
// Materializing wrappers

XRelation x_sort(const XRelation& r, std::vector<SortKey> keys) {
  SortStream s(std::make_unique<VectorTupleStream>(r), std::move(keys));
  return materialize(s);
}

XRelation x_nest(const XRelation& r, std::vector<Path> group_by) {
  NestStream s(std::make_unique<VectorTupleStream>(r), std::move(group_by));
  return materialize(s);
}

XRelation x_unnest(const XRelation& r, Path multi, std::vector<Path> pivots) {
  UnnestStream s(std::make_unique<VectorTupleStream>(r), std::move(multi),
                 std::move(pivots));
  return materialize(s);
}

XRelation x_aggregate(const XRelation& r, AggFn fn, Path attr, Path out,
                      DiagnosticsPtr diag) {
  AggregateStream s(std::make_unique<VectorTupleStream>(r), fn,
                    std::move(attr), std::move(out), std::move(diag));
  return materialize(s);
}

}  // namespace xfed
