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

#ifndef XFED_TESTS_COMMON_LAWS_CORE_HPP_
#define XFED_TESTS_COMMON_LAWS_CORE_HPP_

// Randomized algebraic law checks over the operator stack. Kept free of any
// test framework so the acceptance harness can run the same suite.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "xfed/operators.hpp"
#include "xfed/xml.hpp"

namespace xfed::test {

struct LawStats {
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::vector<std::string> notes;  // first few failures, for the report
};

namespace detail {

inline void tally(LawStats& st, bool ok, const char* law, int iter) {
  ++st.instances;
  if (!ok) {
    ++st.failures;
    if (st.notes.size() < 16)
      st.notes.push_back(std::string(law) + " failed at iteration " +
                         std::to_string(iter));
  }
}

inline int cmp_num(oracle::Num a, oracle::Num b) {
  int s = a.scale > b.scale ? a.scale : b.scale;
  a = oracle::rescale(a, s);
  b = oracle::rescale(b, s);
  if (a.units < b.units) return -1;
  return a.units > b.units ? 1 : 0;
}

inline std::vector<std::string> strings_at(const XRelation& r, std::size_t i,
                                           std::size_t pos) {
  std::vector<std::string> out;
  for (const NodeRef& ref : r.tuples[i].refs(pos))
    out.push_back(r.tuples[i].forest[ref.tree]->string_value(ref.node));
  return out;
}

inline XRelation dedup(const XRelation& r) {
  XRelation out;
  out.schema = r.schema;
  out.ordered = r.ordered;
  std::set<std::string> seen;
  for (const XTuple& t : r.tuples)
    if (seen.insert(canonical_tuple_key(r.schema, t)).second)
      out.tuples.push_back(t);
  return out;
}

inline XRelation filter_by_values(const XRelation& r, std::size_t pos,
                                  const std::vector<std::string>& keys) {
  XRelation out;
  out.schema = r.schema;
  out.ordered = r.ordered;
  for (const XTuple& t : r.tuples) {
    bool hit = false;
    for (const NodeRef& ref : t.refs(pos)) {
      const std::string v = t.forest[ref.tree]->string_value(ref.node);
      for (const std::string& k : keys)
        if (compare_values(v, k) == 0) {
          hit = true;
          break;
        }
      if (hit) break;
    }
    if (hit) out.tuples.push_back(t);
  }
  return out;
}

}  // namespace detail

// Runs every law `40 * scale` times per family and reports instance and
// failure counts. Deterministic for a fixed seed.
inline LawStats run_law_suite(std::uint64_t seed, int scale = 1) {
  using namespace detail;
  LawStats st;
  Gen g(seed);
  const int n_pair = 50 * scale;
  const int n_solo = 50 * scale;

  const Path ak = Path::parse("a/k"), av = Path::parse("a/v");
  const Path bk = Path::parse("b/k"), bw = Path::parse("b/w");

  for (int it = 0; it < n_pair; ++it) {
    XRelation l = g.relation("a", g.irand(2, 6), {"k", "v"});
    XRelation r = g.relation("b", g.irand(2, 6), {"k", "w"});

    PredicatePtr pred = Predicate::cmp_attrs(ak, CmpOp::Eq, bk);
    if (g.irand(0, 1))
      pred = Predicate::conj(
          {pred, Predicate::cmp(bw, CmpOp::Gt, Constant::decimal("2"))});

    // join == restrict over product, for each algorithm
    XRelation expect = x_restrict(x_product(l, r), pred);
    tally(st,
          keys(x_join(l, r, pred, JoinAlgo::NestedLoop)) == keys(expect),
          "join/nested-loop", it);
    tally(st,
          keys(x_join(l, r, pred, JoinAlgo::SortMerge)) == keys(expect),
          "join/sort-merge", it);
    {
      std::size_t kpos = *r.attr_pos(bk);
      DependentJoinStream s(
          std::make_unique<VectorTupleStream>(l), r.schema,
          [&r, kpos](const std::vector<std::string>& ks) {
            return filter_by_values(r, kpos, ks);
          },
          EquiAtom{ak, bk}, pred, (std::size_t)g.irand(1, 5), nullptr);
      tally(st, keys(materialize(s)) == keys(expect), "join/dependent", it);
    }

    // product: pair count and left major value sequences
    {
      XRelation p = x_product(l, r);
      bool ok = p.tuples.size() == l.tuples.size() * r.tuples.size();
      std::size_t i = 0;
      for (const XTuple& lt : l.tuples)
        for (const XTuple& rt : r.tuples) {
          if (!ok) break;
          for (std::size_t c = 0; c < 2 && ok; ++c)
            ok = canonical_attr_value(p.schema, p.tuples[i], c) ==
                 canonical_attr_value(l.schema, lt, c);
          for (std::size_t c = 0; c < 2 && ok; ++c)
            ok = canonical_attr_value(p.schema, p.tuples[i], 2 + c) ==
                 canonical_attr_value(r.schema, rt, c);
          ++i;
        }
      tally(st, ok && validate_relation(p).empty(), "product/pairing", it);
      tally(st,
            keys(x_product(l, r, ProductMode::Pipelined)) == keys(p),
            "product/pipelined", it);
    }

    // set operators against canonical key oracles
    {
      XRelation r2 = g.relation("a", g.irand(2, 6), {"k", "v"});
      std::set<std::string> lk, rk;
      for (const XTuple& t : l.tuples)
        lk.insert(canonical_tuple_key(l.schema, t));
      for (const XTuple& t : r2.tuples)
        rk.insert(canonical_tuple_key(r2.schema, t));
      std::set<std::string> want_union = lk;
      want_union.insert(rk.begin(), rk.end());
      std::set<std::string> want_diff, want_inter;
      for (const std::string& k : lk)
        (rk.count(k) ? want_inter : want_diff).insert(k);
      auto as_set = [](const XRelation& x) {
        std::set<std::string> s;
        for (const XTuple& t : x.tuples)
          s.insert(canonical_tuple_key(x.schema, t));
        return s;
      };
      XRelation u = x_union(l, r2);
      tally(st,
            as_set(u) == want_union && u.tuples.size() == want_union.size(),
            "set/union", it);
      XRelation d = x_difference(l, r2);
      tally(st, as_set(d) == want_diff && d.tuples.size() == want_diff.size(),
            "set/difference", it);
      XRelation x = x_intersection(l, r2);
      tally(st,
            as_set(x) == want_inter && x.tuples.size() == want_inter.size(),
            "set/intersection", it);
    }
  }

  for (int it = 0; it < n_solo; ++it) {
    XRelation r = g.relation("a", g.irand(2, 8), {"k", "v"});

    // conjunctive restriction splits into a cascade
    {
      static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Ge};
      static const char* consts[] = {"2", "5", "45"};
      PredicatePtr p =
          Predicate::cmp(ak, ops[g.irand(0, 2)],
                         Constant::decimal(consts[g.irand(0, 2)]));
      PredicatePtr q = Predicate::contains(av, g.irand(0, 1) ? "5" : "iron");
      tally(st,
            keys_in_order(x_restrict(r, Predicate::conj({p, q}))) ==
                keys_in_order(x_restrict(x_restrict(r, p), q)),
            "restrict/split", it);
      tally(st,
            keys_in_order(x_restrict(r, Predicate::always_true())) ==
                keys_in_order(r),
            "restrict/true", it);
    }

    // projection is idempotent
    {
      XRelation p1 = x_project(r, {ak});
      XRelation p2 = x_project(p1, {ak});
      tally(st, keys_in_order(p1) == keys_in_order(p2), "project/idempotent",
            it);
    }

    // sorting preserves the multiset and is idempotent
    {
      bool desc = g.irand(0, 1) != 0;
      XRelation s1 = x_sort(r, {{ak, desc}});
      tally(st, keys(s1) == keys(r), "sort/multiset", it);
      XRelation s2 = x_sort(s1, {{ak, desc}});
      tally(st, keys_in_order(s2) == keys_in_order(s1), "sort/idempotent", it);
    }

    // set identities
    {
      XRelation empty;
      empty.schema = r.schema;
      empty.ordered = true;
      XRelation dd = dedup(r);
      tally(st, keys(x_union(r, empty)) == keys(dd), "set/union-empty", it);
      tally(st, x_difference(r, r).tuples.empty(), "set/difference-self", it);
      tally(st, keys(x_intersection(r, r)) == keys(dd),
            "set/intersection-self", it);
    }

    // parsing the same text twice yields the same relation
    {
      std::string text;
      int n = g.irand(1, 5);
      for (int i = 0; i < n; ++i) text += g.doc("a", {"k", "v"});
      auto parse_rel = [&] {
        std::vector<Path> attrs = {ak, av};
        return x_source(std::make_unique<XmlEventStream>(text),
                        make_guide({ak, av}), attrs, nullptr);
      };
      tally(st, keys_in_order(parse_rel()) == keys_in_order(parse_rel()),
            "source/deterministic", it);
    }

    // nest then unnest restores a duplicate free single valued relation
    {
      XRelation sv = dedup(g.relation("a", g.irand(2, 8), {"g", "v"}, true));
      XRelation n = x_nest(sv, {Path::parse("a/g")});
      XRelation u = x_unnest(n, Path::parse("a/v"), {Path::parse("a/g")});
      tally(st,
            keys(u) == keys(sv) && validate_relation(n).empty() &&
                validate_relation(u).empty(),
            "nest/round-trip", it);
    }

    // aggregates against the scaled integer oracle
    {
      XRelation ag = g.relation("a", g.irand(1, 5), {"v"});
      const Path in = av, out = Path::parse("agg/val");
      for (AggFn fn : {AggFn::Count, AggFn::Sum, AggFn::Avg, AggFn::Min,
                       AggFn::Max}) {
        XRelation got = x_aggregate(ag, fn, in, out);
        std::size_t opos = *got.attr_pos(out);
        std::size_t ipos = *ag.attr_pos(in);
        bool ok = got.tuples.size() == ag.tuples.size();
        for (std::size_t i = 0; ok && i < got.tuples.size(); ++i) {
          std::vector<std::string> vals = strings_at(ag, i, ipos);
          std::optional<std::string> want;
          if (fn == AggFn::Count) {
            want = std::to_string(vals.size());
          } else {
            std::vector<oracle::Num> nums;
            bool numeric = !vals.empty();
            for (const std::string& v : vals) {
              auto d = oracle::parse(v);
              if (!d) {
                numeric = false;
                break;
              }
              nums.push_back(*d);
            }
            if (numeric) {
              oracle::Num acc = nums[0];
              switch (fn) {
                case AggFn::Min:
                  for (const auto& d : nums)
                    if (cmp_num(d, acc) < 0) acc = d;
                  break;
                case AggFn::Max:
                  for (const auto& d : nums)
                    if (cmp_num(d, acc) > 0) acc = d;
                  break;
                case AggFn::Sum:
                case AggFn::Avg:
                  acc = {0, 0};
                  for (const auto& d : nums) acc = oracle::add(acc, d);
                  if (fn == AggFn::Avg)
                    acc = oracle::div(acc, (long long)nums.size());
                  break;
                case AggFn::Count: break;
              }
              want = oracle::to_string(acc);
            }
          }
          const auto& refs = got.tuples[i].refs(opos);
          if (want)
            ok = refs.size() == 1 &&
                 got.tuples[i].forest[refs[0].tree]->string_value(
                     refs[0].node) == *want;
          else
            ok = refs.empty();
        }
        tally(st, ok, "aggregate/oracle", it);
      }
    }
  }

  return st;
}

}  // namespace xfed::test

#endif  // XFED_TESTS_COMMON_LAWS_CORE_HPP_
