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

#ifndef XFED_PREDICATE_HPP
#define XFED_PREDICATE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xfed/decimal.hpp"
#include "xfed/xtuple.hpp"

namespace xfed {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_text(CmpOp op);

// Comparison constant. Bare numbers in query text are decimal-typed; quoted
// literals are strings. Ordering comparisons against a decimal constant
// treat non-decimal values as atom-false (plus a diagnostics count).
struct Constant {
  std::string text;
  bool is_decimal = false;

  static Constant string(std::string v) { return {std::move(v), false}; }
  static Constant decimal(std::string v) { return {std::move(v), true}; }
};

// Predicate tree over one tuple. Atoms over multi-valued attributes are
// existential: true iff some bound ref (or ref pair) satisfies the test.
// An absent attribute makes the atom false.
struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

struct Predicate {
  enum class Kind {
    CompareConst,  // attr op constant
    CompareAttr,   // attr op attr
    Contains,      // substring on string value
    InSet,         // attr value member of values (batched key pushdown)
    And,
    Or,
    Not,
    True,
  };

  Kind kind = Kind::True;
  Path attr;
  Path attr2;
  CmpOp op = CmpOp::Eq;
  Constant constant;
  std::vector<std::string> values;      // InSet
  std::vector<PredicatePtr> children;   // And/Or/Not

  static PredicatePtr always_true();
  static PredicatePtr cmp(Path a, CmpOp op, Constant c);
  static PredicatePtr cmp_attrs(Path a, CmpOp op, Path b);
  static PredicatePtr contains(Path a, std::string needle);
  static PredicatePtr in_set(Path a, std::vector<std::string> values);
  static PredicatePtr conj(std::vector<PredicatePtr> kids);
  static PredicatePtr disj(std::vector<PredicatePtr> kids);
  static PredicatePtr negate(PredicatePtr kid);

  // Paths mentioned anywhere in the tree, in first-use order, deduped.
  std::vector<Path> mentioned_paths() const;

  // Same tree with every mentioned path's root replaced (aliasing).
  PredicatePtr with_rebased_roots(const std::string& from,
                                  const std::string& to) const;

  // Query-text rendering: "$<var>/rest op rhs and ..." with variables chosen
  // by the root->variable map (falls back to the bare path).
  std::string render(const std::map<std::string, std::string>& var_of_root) const;
};

// Compares two values with the decimal-parse-both-else-bytes rule.
int compare_values(const std::string& a, const std::string& b);

bool eval_predicate(const Predicate& p, const XRelationSchema& schema,
                    const XTuple& t, Diagnostics* diag);

}  // namespace xfed

#endif  // XFED_PREDICATE_HPP
