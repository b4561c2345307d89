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

#ifndef XFED_FRONTEND_HPP_
#define XFED_FRONTEND_HPP_

// FLWR query front end: parser, normalizer (LET elimination and nested
// query validation) and canonizer (simple queries chained by id plus one
// reconstruction template).
//
// Accepted grammar, a fixed XQuery subset:
//
//   query    := for+ let* ('where' cond)? 'return' item+
//   for      := 'for' '$'v 'in' source (',' '$'v 'in' source)*
//   source   := ('Collection'|'collection') '(' '"' name-or-* '"' ')' steps?
//             | '$'v steps?
//   let      := 'let' '$'v ':=' (varpath | literal | query)
//   cond     := group ('and' group)*        -- or binds tighter than and
//   group    := atom ('or' atom)*
//   atom     := 'contains' '(' varpath ',' string ')'
//             | varpath 'in' '(' string (',' string)* ')'
//             | operand ('='|'!='|'<'|'<='|'>'|'>=') operand
//   operand  := varpath | string | number | '?'   -- ? is an adapter
//                                                 -- parameter slot
//   item     := element | varpath | string
//             | '(' item (',' item)* ')'          -- sequence group
//             | 'aggregate' '(' fn ',' varpath ')'
//             | query                             -- nested FLWR
//   element  := '<' tag '>' item* '</' tag '>'
//
// Hints ride along as pragmas, legal wherever whitespace is:
//   (:: hint join=<id> algo=<nested-loop|sort-merge|dependent> ::)
// No order-by, no path predicates, no functions beyond contains and
// aggregate, elements only.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xfed/predicate.hpp"

namespace xfed::frontend {

// Syntax and scoping failures carry the offending position.
struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line = 0;
  int col = 0;
};

struct Hint {
  std::string join_id;
  std::string algo;
};

// $var plus the trailing steps; rel may be empty (the whole binding).
struct VarPath {
  std::string var;
  std::vector<std::string> rel;

  std::string text() const;  // "$var/a/b"
};

struct ForBinding {
  std::string var;
  bool over_collection = true;
  std::string collection;            // name or "*"
  std::string src_var;               // when over a variable
  std::vector<std::string> suffix;   // steps after the source
};

struct Operand {
  enum class Kind { PathRef, String, Number, Param };
  Kind kind = Kind::String;
  VarPath path;
  std::string lit;
};

struct Atom {
  enum class Kind { Cmp, Contains, InSet };
  Kind kind = Kind::Cmp;
  CmpOp op = CmpOp::Eq;
  Operand lhs, rhs;                 // Cmp
  VarPath cpath;                    // Contains / InSet subject
  std::string needle;               // Contains
  std::vector<std::string> values;  // InSet
};

// One or-joined alternative group; the where clause conjoins groups.
struct OrGroup {
  std::vector<Atom> atoms;
};

struct QueryAst;
using QueryAstPtr = std::shared_ptr<QueryAst>;

struct LetBinding {
  std::string var;
  Operand value;        // when flwr is null
  QueryAstPtr flwr;     // set when bound to a nested query
};

struct ReturnNode {
  enum class Kind { Element, Text, Placeholder, Group, Aggregate, Nested };
  Kind kind = Kind::Text;
  std::string tag;                    // Element
  std::string text;                   // Text
  VarPath path;                       // Placeholder / Aggregate subject
  std::string agg_fn;                 // Aggregate
  std::vector<ReturnNode> children;   // Element content / Group items
  QueryAstPtr nested;                 // Nested
};

struct QueryAst {
  std::vector<ForBinding> fors;
  std::vector<LetBinding> lets;
  std::vector<OrGroup> where;       // and-joined
  std::vector<ReturnNode> ret;      // return sequence
  std::vector<Hint> hints;          // pragmas, outermost query only
};

QueryAst parse(const std::string& text);

// Single-line stable rendering; parse(pretty(a)) pretty-prints identically.
std::string pretty(const QueryAst& q);

// Inlines LET bindings (a LET bound to a query that cannot be inlined is
// rejected), folds right-side-only path comparisons to the left, and checks
// that every nested query is correlated with its immediate parent through
// at least one where atom. Idempotent.
QueryAst normalize(const QueryAst& q);

// ---------------------------------------------------------------------------
// Canonical form

struct SimpleFor {
  std::string var;
  bool over_prior = false;   // ranges over a prior simple query's output
  std::string prior_id;
  std::string collection;    // name or "*"
  std::vector<std::string> suffix;
};

struct ReturnItem {
  bool is_group = false;
  VarPath path;                    // when not a group
  std::vector<ReturnItem> group;   // one nesting level deeper
};

struct SimpleQuery {
  std::string id;                   // t1, t2, ...
  std::vector<SimpleFor> fors;
  std::vector<OrGroup> where;       // prior-output refs use the range var
  std::vector<ReturnItem> ret;
};

// Template placeholders refer to a variable of some simple query, or to a
// simple query id directly (outermost level); Scope marks one nest-member
// iteration depth. A placeholder with agg_fn set stands for the output of
// an aggregate over its subject path.
struct TemplateNode {
  enum class Kind { Element, Text, Placeholder, Scope };
  Kind kind = Kind::Text;
  std::string tag;
  std::string text;
  VarPath path;        // Placeholder subject, var may be a query id
  std::string agg_fn;  // non-empty for aggregate placeholders
  int level = 0;       // Scope depth, 1-based
  std::vector<TemplateNode> children;
};

struct VarInfo {
  std::string query_id;  // owning simple query
  int depth = 0;         // nest depth of the variable's return paths
  std::string root;      // explicit root step, "*" when inferred later
};

struct CanonicalForm {
  std::vector<SimpleQuery> queries;
  std::vector<TemplateNode> recon;
  std::map<std::string, VarInfo> vars;
  std::vector<Hint> hints;
};

// Splits a normalized query into chained simple queries plus the
// reconstruction template. Element constructors appear only in the
// template; each nested query level becomes a deeper member scope.
CanonicalForm canonize(const QueryAst& q);

// The `let tN ::= ...` notation plus a final `reconstruct <tpl>` line.
std::string print_canonical(const CanonicalForm& c);

}  // namespace xfed::frontend

#endif  // XFED_FRONTEND_HPP_
