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

#ifndef XFED_XTUPLE_HPP
#define XFED_XTUPLE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xfed/path.hpp"
#include "xfed/xtree.hpp"

namespace xfed {

// Prefix-closed set of paths describing every shape a relation may carry.
using Dataguide = std::set<Path>;
using DataguidePtr = std::shared_ptr<const Dataguide>;

DataguidePtr make_guide(std::vector<Path> paths);          // closes prefixes
DataguidePtr guide_union(const DataguidePtr& a, const DataguidePtr& b);
bool guide_is_prefix_closed(const Dataguide& g);

// Relation schema: ordered attribute paths plus the dataguide. Duplicate
// attribute paths are permitted (joins concatenate both sides verbatim);
// bindings align with attributes positionally.
struct XRelationSchema {
  std::vector<Path> attributes;
  DataguidePtr guide;
};

// Group membership recorded by x_nest so reconstruction can iterate nested
// groups. For each member: per attribute position, the [begin,end) slice of
// that attribute's ref list contributed by the member, plus the shape the
// member's source tuple carried (rebased into the merged ref lists).
struct NestShape {
  struct Member {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;
    std::shared_ptr<const NestShape> child;
  };
  std::vector<Member> members;
};
using NestShapePtr = std::shared_ptr<const NestShape>;

// One binding row: an ordered forest of trees plus, per schema attribute,
// the list of referenced nodes (document order, possibly empty).
struct XTuple {
  std::vector<XTreePtr> forest;
  std::vector<std::vector<NodeRef>> bindings;  // aligned with schema.attributes
  NestShapePtr shape;                          // set by x_nest, else null

  const std::vector<NodeRef>& refs(std::size_t attr_pos) const {
    return bindings[attr_pos];
  }
};

// Materialized relation (streams are the pipeline form; see operators.hpp).
struct XRelation {
  XRelationSchema schema;
  std::vector<XTuple> tuples;
  bool ordered = false;

  std::optional<std::size_t> attr_pos(const Path& p) const;
};

// Canonical text forms used for set-operator equality, grouping and tests:
// attributes in schema order, every ref's subtree serialized, field and ref
// separators that cannot appear in serialized XML.
std::string canonical_attr_value(const XRelationSchema& s, const XTuple& t,
                                 std::size_t attr_pos);
std::string canonical_tuple_key(const XRelationSchema& s, const XTuple& t);
std::string canonical_forest(const XTuple& t);

// Structural validator. Returns human-readable violations; empty == valid.
// Checks: joker-free attrs, binding/attr alignment, refs in range, binding
// path equals root-to-node path, guide prefix closure, forest paths covered
// by the guide, attrs in guide or prefix chain in guide.
std::vector<std::string> validate_tuple(const XRelationSchema& s, const XTuple& t);
std::vector<std::string> validate_relation(const XRelation& r);

// Process-wide switch: when on, operators validate every emitted tuple and
// throw ValidationError on the first violation. Test builds enable it.
void set_validation_enabled(bool on);
bool validation_enabled();

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for malformed event streams and adapter transport failures.
struct StreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an operator's preconditions over child schemas fail.
struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counters surfaced with every execution; never abort the stream.
struct Diagnostics {
  std::uint64_t docs_skipped_unknown_root = 0;
  std::uint64_t branches_pruned_off_guide = 0;
  std::uint64_t non_numeric_under_numeric_cmp = 0;
  std::uint64_t aggregate_input_failures = 0;
  std::uint64_t hints_ignored = 0;
  std::uint64_t warnings = 0;
  std::vector<std::string> messages;

  void warn(std::string msg) {
    ++warnings;
    messages.push_back(std::move(msg));
  }
};
using DiagnosticsPtr = std::shared_ptr<Diagnostics>;

}  // namespace xfed

#endif  // XFED_XTUPLE_HPP
