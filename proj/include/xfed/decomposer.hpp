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

#ifndef XFED_DECOMPOSER_HPP_
#define XFED_DECOMPOSER_HPP_

// Turns a canonical query into an executable algebra plan: split per
// collection variable (atomize), bind each piece to the sources whose
// dataguides cover its paths (locate), assemble sources, joins, nests and
// the reconstruction root (build), then improve the plan (optimize).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xfed/catalog.hpp"
#include "xfed/frontend.hpp"
#include "xfed/operators.hpp"
#include "xfed/recon.hpp"

namespace xfed {

// Single-collection fragment of the canonical form. Conditions and return
// paths are kept variable-relative until plan build, where each variable
// gets a distinct tuple-space root.
struct AtomicQuery {
  std::string id;         // t1, t2, ... in variable order
  std::string var;        // the canonical query's variable
  std::string query_id;   // owning simple query
  int depth = 0;          // member depth of this variable's columns
  std::string collection; // collection name or "*"
  std::string root;       // explicit root step, "*" until metadata fills it
  std::vector<frontend::OrGroup> restriction;  // atoms over var alone
  std::vector<std::vector<std::string>> ret;   // returned rel steps, in order
  std::vector<std::vector<std::string>> used;  // ret plus condition rels
};

// Condition group spanning exactly two atomic queries. Prior-query
// references are already resolved to the defining variable.
struct JoinAtom {
  std::string id;  // j1, j2, ... in discovery order
  std::string left_atomic, right_atomic;
  frontend::OrGroup group;
};

// Aggregate computed above the nest tree; its synthetic output attribute
// feeds one template placeholder.
struct AggregateSpec {
  AggFn fn = AggFn::Count;
  std::string atomic_id;         // subject variable's fragment
  std::vector<std::string> rel;  // subject rel steps under that variable
  Path out;                      // synthetic output attribute
};

// One returned column in global flatten order; nest level d groups every
// column of depth >= d under the shallower ones.
struct NestCol {
  std::string atomic_id;
  std::vector<std::string> rel;
  int depth = 0;
};

struct GlobalQuery {
  std::vector<JoinAtom> joins;
  std::vector<AggregateSpec> aggregates;
  std::vector<NestCol> columns;
  int max_depth = 0;  // deepest member level over all return columns
};

// Splits the canonical form. Throws PlanError on shapes the planner does
// not cover: an atom spanning three variables, parameter slots, or several
// nested queries hanging off the same parent.
std::pair<std::vector<AtomicQuery>, GlobalQuery> atomize(
    const frontend::CanonicalForm& c);

// One source serving an atomic query.
struct SourceBinding {
  std::string source_id;
  std::string collection;  // concrete collection name at that source
  Capability capability = Capability::XmlFile;
  std::string transport;
  std::uint64_t cardinality = 0;
  std::string root;  // concrete root step served there
};

struct BoundAtomic {
  AtomicQuery atom;
  std::string tuple_root;  // plan-space root (aliased on label collisions)
  std::vector<SourceBinding> sources;  // empty: nothing serves the paths
};

// Binds every atomic query against the catalog. A source qualifies when
// one of its collections matches the pattern and its dataguide holds all
// used paths. Missing bindings are reported on diag, not thrown.
std::vector<BoundAtomic> locate_sources(const std::vector<AtomicQuery>& atoms,
                                        const Catalog& cat,
                                        DiagnosticsPtr diag);

struct PlanNode;
using PlanNodePtr = std::shared_ptr<const PlanNode>;

struct PlanNode {
  enum class Kind {
    Source,       // adapter query dispatch
    Empty,        // zero tuples with a known schema
    Union,        // set union of replicas
    Restrict,
    Join,
    Nest,
    Aggregate,
    Reconstruct
  };
  Kind kind = Kind::Empty;
  std::vector<PlanNodePtr> children;

  // Source
  std::string atomic_id;
  std::string source_id;
  std::string collection;
  Capability capability = Capability::XmlFile;
  std::uint64_t cardinality = 0;
  std::vector<Path> attrs;  // tuple-space paths this leaf binds
  DataguidePtr guide;
  std::optional<SourceStream::RootRename> rename;
  std::string query;       // adapter query text
  std::string slot_query;  // with the join key as a '?' slot (dependent use)
  bool restricted = false; // condition already pushed into `query`

  // Restrict / Join
  PredicatePtr pred;
  std::string join_id;
  JoinAlgo algo = JoinAlgo::NestedLoop;

  // Nest
  std::vector<Path> keys;

  // Aggregate
  AggFn agg_fn = AggFn::Count;
  Path agg_attr, agg_out;

  // Reconstruct
  ReconTemplate tpl;
};

struct PlanOptions {
  // Dependent-join batch width; also the key-count bound under which a
  // restricted single-source join input may drive a dependent rewrite.
  std::size_t batch_size = 64;
};

struct Plan {
  PlanNodePtr root;        // Reconstruct node
  bool tuple_mode = false; // template carries no markup: serve raw tuples
  std::vector<frontend::Hint> hints;
  PlanOptions options;
  // Working state the optimizer rebuilds the tree from.
  std::vector<BoundAtomic> bound;
  GlobalQuery global;
  std::vector<frontend::TemplateNode> recon;
};

// atomize + locate + build. The result is executable but unoptimized:
// sources fetch whole documents and every condition sits in the plan.
Plan decompose(const frontend::CanonicalForm& c, const Catalog& cat,
               DiagnosticsPtr diag, const PlanOptions& opts = {});

// Optimization passes, in order: conditions pushed into source queries,
// source return lists narrowed to used paths, same-source query-language
// joins fused into one adapter query, joins reordered by ascending declared
// cardinality, dependent rewrite where a small restricted input drives a
// keyed lookup, then user hints. Unknown hint ids warn and count on diag.
Plan optimize(const Plan& p, DiagnosticsPtr diag);

// Stable indented rendering, one operator per line, for golden tests.
std::string plan_text(const Plan& p);

// Atomization listing used by worked-example goldens: one line per atomic
// query plus its bindings, then the join atoms.
std::string decomposition_text(const std::vector<BoundAtomic>& bound,
                               const GlobalQuery& global);

}  // namespace xfed

#endif  // XFED_DECOMPOSER_HPP_
