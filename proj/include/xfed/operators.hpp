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

#ifndef XFED_OPERATORS_HPP
#define XFED_OPERATORS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xfed/events.hpp"
#include "xfed/predicate.hpp"
#include "xfed/xtuple.hpp"

namespace xfed {

// Pull-based pipeline node. Construction is the prepare step: it computes
// the output schema and validates parameters against child schemas (throws
// PlanError). next() is the execute step; nullopt ends the stream.
class TupleStream {
 public:
  virtual ~TupleStream() = default;
  const XRelationSchema& schema() const { return schema_; }
  bool ordered() const { return ordered_; }
  virtual std::optional<XTuple> next() = 0;

 protected:
  // Runs the structural validator on emitted tuples when enabled.
  XTuple checked(XTuple t) const;

  XRelationSchema schema_;
  bool ordered_ = false;
};
using TupleStreamPtr = std::unique_ptr<TupleStream>;

XRelation materialize(TupleStream& s);

class VectorTupleStream : public TupleStream {
 public:
  explicit VectorTupleStream(XRelation rel);
  std::optional<XTuple> next() override;

 private:
  XRelation rel_;
  std::size_t pos_ = 0;
};

// Turns a document event stream into tuples: one tuple per document (a
// document may hold several top-level elements; they become the forest).
// Non-blocking: each tuple is emitted as soon as its document completes.
// Documents with a root outside the guide are skipped; branches outside the
// guide are pruned; both are counted in diagnostics.
class SourceStream : public TupleStream {
 public:
  struct RootRename {
    std::string from, to;
  };

  SourceStream(EventStreamPtr events, DataguidePtr guide,
               std::vector<Path> attrs, DiagnosticsPtr diag,
               std::optional<RootRename> rename = std::nullopt);
  std::optional<XTuple> next() override;

 private:
  EventStreamPtr events_;
  DiagnosticsPtr diag_;
  std::optional<RootRename> rename_;
  std::vector<std::string> guide_roots_;
  bool done_ = false;
};

class ProjectStream : public TupleStream {
 public:
  ProjectStream(TupleStreamPtr child, std::vector<Path> keep);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr child_;
  std::vector<Path> keep_;
};

class RestrictStream : public TupleStream {
 public:
  RestrictStream(TupleStreamPtr child, PredicatePtr pred, DiagnosticsPtr diag);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr child_;
  PredicatePtr pred_;
  DiagnosticsPtr diag_;
};

enum class ProductMode { NestedLoop, Pipelined };

// Forest merge used by x_product and every x_join algorithm. Trees pair up
// when their root label occurs exactly once on each side; everything else is
// concatenated. Bindings are left's then right's, refs retargeted.
XTuple merge_tuples(const XTuple& l, const XTuple& r);

class ProductStream : public TupleStream {
 public:
  ProductStream(TupleStreamPtr l, TupleStreamPtr r,
                ProductMode mode = ProductMode::NestedLoop);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr left_, right_;
  ProductMode mode_;
  std::vector<XTuple> inner_;      // materialized side
  bool inner_ready_ = false;
  std::optional<XTuple> outer_cur_;
  std::size_t inner_pos_ = 0;
};

enum class JoinAlgo { NestedLoop, SortMerge, Dependent };

const char* join_algo_name(JoinAlgo a);
std::optional<JoinAlgo> join_algo_from(std::string_view name);

struct EquiAtom {
  Path left, right;
};

// Finds the first equality atom usable as a merge/dependent key: one side
// resolving only in ls, the other only in rs (conjunction level only).
std::optional<EquiAtom> find_equi_atom(const Predicate& p,
                                       const XRelationSchema& ls,
                                       const XRelationSchema& rs);

class JoinStream : public TupleStream {
 public:
  JoinStream(TupleStreamPtr l, TupleStreamPtr r, PredicatePtr pred,
             JoinAlgo algo, DiagnosticsPtr diag);
  std::optional<XTuple> next() override;

 private:
  std::optional<XTuple> next_nested_loop();
  std::optional<XTuple> next_sort_merge();
  void prepare_sort_merge();

  TupleStreamPtr left_, right_;
  PredicatePtr pred_;
  JoinAlgo algo_;
  DiagnosticsPtr diag_;

  std::vector<XTuple> inner_;
  bool inner_ready_ = false;
  std::optional<XTuple> outer_cur_;
  std::size_t inner_pos_ = 0;

  // Sort-merge state. Tuples with a multi-valued key attribute contribute
  // one sorted entry per distinct value; sm_emitted_ keeps a pair from being
  // produced twice when both sides share several key values.
  EquiAtom equi_;
  std::vector<XTuple> lmat_, rmat_;
  std::vector<std::pair<std::string, std::size_t>> lkeys_, rkeys_;
  std::size_t li_ = 0, ri_ = 0;     // next unconsumed run start
  std::size_t run_li_ = 0, run_ri_ = 0, run_le_ = 0, run_re_ = 0;
  bool in_run_ = false;
  bool sm_ready_ = false;
  std::set<std::pair<std::size_t, std::size_t>> sm_emitted_;
};

// Dependent join: streams the left side, batches distinct key values and
// fetches matching right tuples per batch through the factory (an adapter
// sub-query). The full predicate still runs on every merged pair.
class DependentJoinStream : public TupleStream {
 public:
  using RightFactory =
      std::function<XRelation(const std::vector<std::string>& keys)>;

  DependentJoinStream(TupleStreamPtr l, XRelationSchema right_schema,
                      RightFactory fetch_right, EquiAtom equi,
                      PredicatePtr pred, std::size_t batch_size,
                      DiagnosticsPtr diag);
  std::optional<XTuple> next() override;

 private:
  bool fill_batch();

  TupleStreamPtr left_;
  XRelationSchema right_schema_;
  RightFactory fetch_right_;
  EquiAtom equi_;
  PredicatePtr pred_;
  std::size_t batch_size_;
  DiagnosticsPtr diag_;

  std::vector<XTuple> batch_left_, batch_right_;
  std::size_t bl_ = 0, br_ = 0;
  bool left_done_ = false;
};

struct SortKey {
  Path attr;
  bool desc = false;
};

// Stable sort; per key the first bound ref's string value is compared with
// absent < decimal-parsable (numerically) < other text (bytewise) ascending.
class SortStream : public TupleStream {
 public:
  SortStream(TupleStreamPtr child, std::vector<SortKey> keys);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr child_;
  std::vector<SortKey> keys_;
  std::vector<XTuple> sorted_;
  bool ready_ = false;
  std::size_t pos_ = 0;
};

// Groups tuples with equal canonical values on group_by. Group-bearing trees
// unify across members only when canonically identical; other trees are
// appended per member. Output tuples carry a NestShape recording each
// member's ref ranges for reconstruction. Ordered by group key.
class NestStream : public TupleStream {
 public:
  NestStream(TupleStreamPtr child, std::vector<Path> group_by);
  std::optional<XTuple> next() override;

 private:
  XTuple merge_group(std::vector<XTuple>&& members) const;

  TupleStreamPtr child_;
  std::vector<Path> group_by_;
  std::vector<bool> is_group_pos_;
  std::vector<XTuple> out_;
  bool ready_ = false;
  std::size_t pos_ = 0;
};

class UnnestStream : public TupleStream {
 public:
  UnnestStream(TupleStreamPtr child, Path multi, std::vector<Path> pivots);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr child_;
  Path multi_;
  std::vector<Path> pivots_;
  std::optional<XTuple> cur_;
  std::size_t ref_pos_ = 0;
};

enum class AggFn { Min, Max, Count, Avg, Sum };

const char* agg_fn_name(AggFn f);
std::optional<AggFn> agg_fn_from(std::string_view name);

// Per-tuple aggregate over the value collection bound to attr; the result is
// bound to `out` as a synthetic single-leaf tree appended to the forest.
// Non-numeric input (or an empty collection, except COUNT) leaves the output
// attribute absent and counts a diagnostic.
class AggregateStream : public TupleStream {
 public:
  AggregateStream(TupleStreamPtr child, AggFn fn, Path attr, Path out,
                  DiagnosticsPtr diag);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr child_;
  AggFn fn_;
  Path attr_;
  Path out_;
  DiagnosticsPtr diag_;
};

enum class SetOpKind { Union, Difference, Intersection };

// Set semantics over canonical tuple keys. Union preserves left-then-right
// first-occurrence order; difference/intersection preserve left order.
class SetOpStream : public TupleStream {
 public:
  SetOpStream(TupleStreamPtr l, TupleStreamPtr r, SetOpKind kind);
  std::optional<XTuple> next() override;

 private:
  TupleStreamPtr left_, right_;
  SetOpKind kind_;
  std::set<std::string> right_keys_;
  std::set<std::string> seen_;
  bool right_ready_ = false;
  bool left_done_ = false;
};

// Materializing wrappers around the streams, used by tests and small tools.
XRelation x_source(EventStreamPtr events, DataguidePtr guide,
                   std::vector<Path> attrs, DiagnosticsPtr diag = nullptr);
XRelation x_project(const XRelation& r, std::vector<Path> keep);
XRelation x_restrict(const XRelation& r, PredicatePtr p,
                     DiagnosticsPtr diag = nullptr);
XRelation x_product(const XRelation& l, const XRelation& r,
                    ProductMode mode = ProductMode::NestedLoop);
XRelation x_join(const XRelation& l, const XRelation& r, PredicatePtr p,
                 JoinAlgo algo = JoinAlgo::NestedLoop,
                 DiagnosticsPtr diag = nullptr);
XRelation x_sort(const XRelation& r, std::vector<SortKey> keys);
XRelation x_nest(const XRelation& r, std::vector<Path> group_by);
XRelation x_unnest(const XRelation& r, Path multi, std::vector<Path> pivots);
XRelation x_aggregate(const XRelation& r, AggFn fn, Path attr, Path out,
                      DiagnosticsPtr diag = nullptr);
XRelation x_union(const XRelation& l, const XRelation& r);
XRelation x_difference(const XRelation& l, const XRelation& r);
XRelation x_intersection(const XRelation& l, const XRelation& r);

}  // namespace xfed

#endif  // XFED_OPERATORS_HPP
