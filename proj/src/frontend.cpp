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

#include "xfed/frontend.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>

#include "xfed/xtuple.hpp"

namespace xfed::frontend {

namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '-';
}

bool space_char(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Character-level scanner with line/column tracking. Hint pragmas are
// consumed as whitespace and collected on the side.
class Scanner {
 public:
  explicit Scanner(const std::string& text) : s_(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col_, msg);
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < s_.size() && space_char(s_[pos_])) advance();
      if (s_.compare(pos_, 3, "(::") == 0) {
        pragma();
        continue;
      }
      return;
    }
  }

  bool at_eof() {
    skip_ws();
    return pos_ >= s_.size();
  }

  // Raw lookahead, no whitespace skipping.
  char peek_raw(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }

  char peek() {
    skip_ws();
    return peek_raw();
  }

  bool try_char(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect_char(char c, const char* what) {
    if (!try_char(c)) fail(std::string("expected '") + c + "' " + what);
  }

  // Matches a literal that must not run into a following identifier char.
  bool try_word(const char* w) {
    skip_ws();
    std::size_t n = std::char_traits<char>::length(w);
    if (s_.compare(pos_, n, w) != 0) return false;
    if (pos_ + n < s_.size() && ident_char(s_[pos_ + n])) return false;
    for (std::size_t i = 0; i < n; ++i) advance();
    return true;
  }

  bool peek_word(const char* w) {
    skip_ws();
    std::size_t n = std::char_traits<char>::length(w);
    if (s_.compare(pos_, n, w) != 0) return false;
    return pos_ + n >= s_.size() || !ident_char(s_[pos_ + n]);
  }

  void expect_word(const char* w) {
    if (!try_word(w)) fail(std::string("expected '") + w + "'");
  }

  bool try_seq(const char* w) {
    skip_ws();
    std::size_t n = std::char_traits<char>::length(w);
    if (s_.compare(pos_, n, w) != 0) return false;
    for (std::size_t i = 0; i < n; ++i) advance();
    return true;
  }

  std::string ident(const char* what) {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) {
      fail(std::string("expected ") + what);
    }
    std::string out;
    while (pos_ < s_.size() && ident_char(s_[pos_])) {
      out.push_back(s_[pos_]);
      advance();
    }
    return out;
  }

  // Double-quoted, no escape sequences.
  std::string string_lit() {
    skip_ws();
    if (peek_raw() != '"') fail("expected string literal");
    advance();
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      out.push_back(s_[pos_]);
      advance();
    }
    if (pos_ >= s_.size()) fail("unterminated string literal");
    advance();
    return out;
  }

  std::string number_lit() {
    skip_ws();
    std::string out;
    if (peek_raw() == '-') {
      out.push_back('-');
      advance();
    }
    if (!std::isdigit(static_cast<unsigned char>(peek_raw()))) {
      fail("expected number");
    }
    while (std::isdigit(static_cast<unsigned char>(peek_raw()))) {
      out.push_back(peek_raw());
      advance();
    }
    if (peek_raw() == '.') {
      out.push_back('.');
      advance();
      if (!std::isdigit(static_cast<unsigned char>(peek_raw()))) {
        fail("expected digits after decimal point");
      }
      while (std::isdigit(static_cast<unsigned char>(peek_raw()))) {
        out.push_back(peek_raw());
        advance();
      }
    }
    return out;
  }

  int line() const { return line_; }
  int col() const { return col_; }
  std::vector<Hint> take_hints() { return std::move(hints_); }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // (:: hint join=<id> algo=<name> ::)
  void pragma() {
    for (int i = 0; i < 3; ++i) advance();
    Hint h;
    expect_word("hint");
    expect_word("join");
    expect_char('=', "in hint");
    h.join_id = ident("join id");
    expect_word("algo");
    expect_char('=', "in hint");
    h.algo = ident("algorithm name");
    if (h.algo != "nested-loop" && h.algo != "sort-merge" &&
        h.algo != "dependent") {
      fail("unknown join algorithm '" + h.algo + "'");
    }
    skip_spaces_only();
    if (s_.compare(pos_, 3, "::)") != 0) fail("unterminated hint pragma");
    for (int i = 0; i < 3; ++i) advance();
    hints_.push_back(std::move(h));
  }

  void skip_spaces_only() {
    while (pos_ < s_.size() && space_char(s_[pos_])) advance();
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Hint> hints_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : sc_(text) {}

  QueryAst parse_top() {
    QueryAst q = parse_query();
    if (!sc_.at_eof()) sc_.fail("unexpected trailing input");
    q.hints = sc_.take_hints();
    return q;
  }

 private:
  QueryAst parse_query() {
    scopes_.emplace_back();
    QueryAst q;
    sc_.expect_word("for");
    do {
      q.fors.push_back(parse_binding());
    } while (sc_.try_char(',') || sc_.try_word("for"));
    while (sc_.try_word("let")) q.lets.push_back(parse_let());
    if (sc_.try_word("where")) q.where = parse_cond();
    sc_.expect_word("return");
    q.ret = parse_items();
    if (q.ret.empty()) sc_.fail("empty return clause");
    scopes_.pop_back();
    return q;
  }

  ForBinding parse_binding() {
    ForBinding b;
    sc_.expect_char('$', "before variable name");
    b.var = sc_.ident("variable name");
    sc_.expect_word("in");
    if (sc_.try_char('$')) {
      b.over_collection = false;
      b.src_var = sc_.ident("variable name");
      require_known(b.src_var);
    } else {
      if (!sc_.try_word("Collection") && !sc_.try_word("collection")) {
        sc_.fail("expected Collection(\"name\") or a variable");
      }
      sc_.expect_char('(', "after Collection");
      b.collection = sc_.string_lit();
      if (b.collection.empty()) sc_.fail("empty collection name");
      sc_.expect_char(')', "after collection name");
    }
    while (sc_.try_char('/')) b.suffix.push_back(sc_.ident("path step"));
    declare(b.var);
    return b;
  }

  LetBinding parse_let() {
    LetBinding l;
    sc_.expect_char('$', "before variable name");
    l.var = sc_.ident("variable name");
    if (!sc_.try_seq(":=")) sc_.fail("expected ':=' in let");
    if (sc_.peek_word("for")) {
      l.flwr = std::make_shared<QueryAst>(parse_query());
    } else {
      l.value = parse_operand();
      if (l.value.kind == Operand::Kind::Param) {
        sc_.fail("'?' is not a valid let value");
      }
    }
    declare(l.var);
    return l;
  }

  std::vector<OrGroup> parse_cond() {
    std::vector<OrGroup> groups;
    do {
      groups.push_back(parse_group());
    } while (sc_.try_word("and"));
    return groups;
  }

  OrGroup parse_group() {
    OrGroup g;
    bool wrapped = sc_.try_char('(');
    do {
      g.atoms.push_back(parse_atom());
    } while (sc_.try_word("or"));
    if (wrapped) sc_.expect_char(')', "after condition group");
    return g;
  }

  Atom parse_atom() {
    Atom a;
    if (sc_.try_word("contains")) {
      a.kind = Atom::Kind::Contains;
      sc_.expect_char('(', "after contains");
      a.cpath = parse_varpath();
      sc_.expect_char(',', "in contains");
      a.needle = sc_.string_lit();
      sc_.expect_char(')', "after contains");
      return a;
    }
    a.lhs = parse_operand();
    if (a.lhs.kind == Operand::Kind::PathRef && sc_.try_word("in")) {
      a.kind = Atom::Kind::InSet;
      a.cpath = a.lhs.path;
      sc_.expect_char('(', "after in");
      do {
        a.values.push_back(sc_.string_lit());
      } while (sc_.try_char(','));
      sc_.expect_char(')', "after value list");
      return a;
    }
    a.kind = Atom::Kind::Cmp;
    a.op = parse_cmpop();
    a.rhs = parse_operand();
    return a;
  }

  CmpOp parse_cmpop() {
    if (sc_.try_seq("!=")) return CmpOp::Ne;
    if (sc_.try_seq("<=")) return CmpOp::Le;
    if (sc_.try_seq(">=")) return CmpOp::Ge;
    if (sc_.try_char('<')) return CmpOp::Lt;
    if (sc_.try_char('>')) return CmpOp::Gt;
    if (sc_.try_char('=')) return CmpOp::Eq;
    sc_.fail("expected comparison operator");
  }

  Operand parse_operand() {
    Operand o;
    char c = sc_.peek();
    if (c == '$') {
      o.kind = Operand::Kind::PathRef;
      o.path = parse_varpath();
    } else if (c == '"') {
      o.kind = Operand::Kind::String;
      o.lit = sc_.string_lit();
    } else if (c == '?') {
      sc_.try_char('?');
      o.kind = Operand::Kind::Param;
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      o.kind = Operand::Kind::Number;
      o.lit = sc_.number_lit();
    } else {
      sc_.fail("expected path, literal or '?'");
    }
    return o;
  }

  VarPath parse_varpath() {
    VarPath p;
    sc_.expect_char('$', "before variable name");
    p.var = sc_.ident("variable name");
    require_known(p.var);
    while (sc_.try_char('/')) p.rel.push_back(sc_.ident("path step"));
    return p;
  }

  // Return item sequence; stops before a closing tag, ')' or ','
  // (group contexts), a keyword, or end of input.
  std::vector<ReturnNode> parse_items() {
    std::vector<ReturnNode> items;
    for (;;) {
      if (sc_.at_eof()) break;
      char c = sc_.peek();
      if (c == '<') {
        if (sc_.peek_raw(1) == '/') break;
        items.push_back(parse_element());
      } else if (c == '"' || c == '$' || c == '(') {
        items.push_back(parse_simple_item());
      } else if (sc_.peek_word("aggregate") || sc_.peek_word("for")) {
        items.push_back(parse_simple_item());
      } else {
        break;
      }
    }
    return items;
  }

  ReturnNode parse_element() {
    ReturnNode n;
    n.kind = ReturnNode::Kind::Element;
    sc_.expect_char('<', "to open element");
    n.tag = sc_.ident("element name");
    sc_.expect_char('>', "after element name");
    n.children = parse_items();
    if (!sc_.try_seq("</")) sc_.fail("expected closing tag </" + n.tag + ">");
    std::string close = sc_.ident("element name");
    if (close != n.tag) {
      sc_.fail("mismatched closing tag </" + close + ">, expected </" +
               n.tag + ">");
    }
    sc_.expect_char('>', "after closing tag name");
    return n;
  }

  ReturnNode parse_simple_item() {
    ReturnNode n;
    char c = sc_.peek();
    if (c == '"') {
      n.kind = ReturnNode::Kind::Text;
      n.text = sc_.string_lit();
    } else if (c == '$') {
      n.kind = ReturnNode::Kind::Placeholder;
      n.path = parse_varpath();
    } else if (c == '(') {
      n.kind = ReturnNode::Kind::Group;
      sc_.try_char('(');
      for (;;) {
        n.children.push_back(parse_simple_item());
        if (!sc_.try_char(',')) break;
        if (sc_.peek() == ')') break;  // tolerate a trailing comma
      }
      sc_.expect_char(')', "after group");
    } else if (sc_.peek_word("aggregate")) {
      sc_.try_word("aggregate");
      n.kind = ReturnNode::Kind::Aggregate;
      sc_.expect_char('(', "after aggregate");
      n.agg_fn = sc_.ident("aggregate function");
      sc_.expect_char(',', "in aggregate");
      n.path = parse_varpath();
      sc_.expect_char(')', "after aggregate");
    } else if (sc_.peek_word("for")) {
      n.kind = ReturnNode::Kind::Nested;
      n.nested = std::make_shared<QueryAst>(parse_query());
    } else {
      sc_.fail("expected return item");
    }
    return n;
  }

  void declare(const std::string& v) {
    for (const auto& s : scopes_) {
      if (s.count(v)) sc_.fail("duplicate variable $" + v);
    }
    scopes_.back().insert(v);
  }

  void require_known(const std::string& v) const {
    for (const auto& s : scopes_) {
      if (s.count(v)) return;
    }
    sc_.fail("unknown variable $" + v);
  }

  Scanner sc_;
  std::vector<std::set<std::string>> scopes_;
};

// ---------------------------------------------------------------------------
// Printing

const char* op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "=";
}

void print_operand(std::ostringstream& o, const Operand& v) {
  switch (v.kind) {
    case Operand::Kind::PathRef: o << v.path.text(); break;
    case Operand::Kind::String: o << '"' << v.lit << '"'; break;
    case Operand::Kind::Number: o << v.lit; break;
    case Operand::Kind::Param: o << '?'; break;
  }
}

void print_atom(std::ostringstream& o, const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::Contains:
      o << "contains(" << a.cpath.text() << ", \"" << a.needle << "\")";
      break;
    case Atom::Kind::InSet: {
      o << a.cpath.text() << " in (";
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (i) o << ", ";
        o << '"' << a.values[i] << '"';
      }
      o << ')';
      break;
    }
    case Atom::Kind::Cmp:
      print_operand(o, a.lhs);
      o << ' ' << op_text(a.op) << ' ';
      print_operand(o, a.rhs);
      break;
  }
}

void print_cond(std::ostringstream& o, const std::vector<OrGroup>& groups) {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) o << " and ";
    const OrGroup& g = groups[i];
    if (g.atoms.size() > 1) o << '(';
    for (std::size_t j = 0; j < g.atoms.size(); ++j) {
      if (j) o << " or ";
      print_atom(o, g.atoms[j]);
    }
    if (g.atoms.size() > 1) o << ')';
  }
}

void print_query(std::ostringstream& o, const QueryAst& q);

void print_item(std::ostringstream& o, const ReturnNode& n) {
  switch (n.kind) {
    case ReturnNode::Kind::Element:
      o << '<' << n.tag << '>';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) o << ' ';
        print_item(o, n.children[i]);
      }
      o << "</" << n.tag << '>';
      break;
    case ReturnNode::Kind::Text:
      o << '"' << n.text << '"';
      break;
    case ReturnNode::Kind::Placeholder:
      o << n.path.text();
      break;
    case ReturnNode::Kind::Group: {
      o << '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) o << ", ";
        print_item(o, n.children[i]);
      }
      o << ')';
      break;
    }
    case ReturnNode::Kind::Aggregate:
      o << "aggregate(" << n.agg_fn << ", " << n.path.text() << ')';
      break;
    case ReturnNode::Kind::Nested:
      print_query(o, *n.nested);
      break;
  }
}

void print_query(std::ostringstream& o, const QueryAst& q) {
  o << "for ";
  for (std::size_t i = 0; i < q.fors.size(); ++i) {
    if (i) o << ", ";
    const ForBinding& b = q.fors[i];
    o << '$' << b.var << " in ";
    if (b.over_collection) {
      o << "Collection(\"" << b.collection << "\")";
    } else {
      o << '$' << b.src_var;
    }
    for (const auto& s : b.suffix) o << '/' << s;
  }
  for (const auto& l : q.lets) {
    o << " let $" << l.var << " := ";
    if (l.flwr) {
      print_query(o, *l.flwr);
    } else {
      print_operand(o, l.value);
    }
  }
  if (!q.where.empty()) {
    o << " where ";
    print_cond(o, q.where);
  }
  o << " return ";
  for (std::size_t i = 0; i < q.ret.size(); ++i) {
    if (i) o << ' ';
    print_item(o, q.ret[i]);
  }
}

// ---------------------------------------------------------------------------
// Normalization

using Env = std::map<std::string, Operand>;

Operand resolve_operand(const Operand& v, const Env& env) {
  if (v.kind != Operand::Kind::PathRef) return v;
  auto it = env.find(v.path.var);
  if (it == env.end()) return v;
  const Operand& bound = it->second;
  if (bound.kind == Operand::Kind::PathRef) {
    Operand out = bound;
    out.path.rel.insert(out.path.rel.end(), v.path.rel.begin(),
                        v.path.rel.end());
    return out;
  }
  if (!v.path.rel.empty()) {
    throw PlanError("frontend: $" + v.path.var +
                    " is a literal, it has no path steps");
  }
  return bound;
}

VarPath resolve_path(const VarPath& p, const Env& env, const char* use) {
  Operand o;
  o.kind = Operand::Kind::PathRef;
  o.path = p;
  Operand r = resolve_operand(o, env);
  if (r.kind != Operand::Kind::PathRef) {
    throw PlanError(std::string("frontend: ") + use + " requires a path, $" +
                    p.var + " is a literal");
  }
  return r.path;
}

CmpOp mirror(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

void collect_atom_vars(const Atom& a, std::set<std::string>* vars) {
  if (a.kind == Atom::Kind::Cmp) {
    if (a.lhs.kind == Operand::Kind::PathRef) vars->insert(a.lhs.path.var);
    if (a.rhs.kind == Operand::Kind::PathRef) vars->insert(a.rhs.path.var);
  } else {
    vars->insert(a.cpath.var);
  }
}

QueryAst normalize_impl(const QueryAst& q, Env env) {
  QueryAst out;
  out.hints = q.hints;
  for (const auto& l : q.lets) {
    if (l.flwr) {
      throw PlanError("frontend: let $" + l.var +
                      " binds a query; query lets cannot be inlined");
    }
    env[l.var] = resolve_operand(l.value, env);
  }
  for (ForBinding f : q.fors) {
    if (!f.over_collection) {
      auto it = env.find(f.src_var);
      if (it != env.end()) {
        if (it->second.kind != Operand::Kind::PathRef) {
          throw PlanError("frontend: for $" + f.var + " iterates a literal");
        }
        f.src_var = it->second.path.var;
        std::vector<std::string> steps = it->second.path.rel;
        steps.insert(steps.end(), f.suffix.begin(), f.suffix.end());
        f.suffix = std::move(steps);
      }
    }
    out.fors.push_back(std::move(f));
  }
  for (const OrGroup& g : q.where) {
    OrGroup ng;
    for (Atom a : g.atoms) {
      if (a.kind == Atom::Kind::Cmp) {
        a.lhs = resolve_operand(a.lhs, env);
        a.rhs = resolve_operand(a.rhs, env);
        if (a.lhs.kind != Operand::Kind::PathRef &&
            a.rhs.kind == Operand::Kind::PathRef) {
          std::swap(a.lhs, a.rhs);
          a.op = mirror(a.op);
        }
      } else {
        a.cpath = resolve_path(a.cpath, env,
                               a.kind == Atom::Kind::Contains ? "contains"
                                                              : "in");
      }
      ng.atoms.push_back(std::move(a));
    }
    out.where.push_back(std::move(ng));
  }

  std::set<std::string> own_vars;
  for (const auto& f : out.fors) own_vars.insert(f.var);

  struct Walker {
    const Env& env;
    const std::set<std::string>& own_vars;

    ReturnNode walk(const ReturnNode& n) {
      ReturnNode out = n;
      switch (n.kind) {
        case ReturnNode::Kind::Placeholder: {
          Operand o;
          o.kind = Operand::Kind::PathRef;
          o.path = n.path;
          Operand r = resolve_operand(o, env);
          if (r.kind == Operand::Kind::PathRef) {
            out.path = r.path;
          } else {
            out.kind = ReturnNode::Kind::Text;
            out.text = r.lit;
            out.path = {};
          }
          break;
        }
        case ReturnNode::Kind::Aggregate:
          out.path = resolve_path(n.path, env, "aggregate");
          break;
        case ReturnNode::Kind::Element:
        case ReturnNode::Kind::Group: {
          out.children.clear();
          for (const auto& c : n.children) out.children.push_back(walk(c));
          break;
        }
        case ReturnNode::Kind::Nested: {
          QueryAst inner = normalize_impl(*n.nested, env);
          std::set<std::string> used;
          for (const auto& g : inner.where) {
            for (const auto& a : g.atoms) collect_atom_vars(a, &used);
          }
          bool correlated = false;
          for (const auto& v : used) {
            if (own_vars.count(v)) correlated = true;
          }
          if (!correlated) {
            throw PlanError(
                "frontend: nested query must be correlated with its parent "
                "query through a where atom");
          }
          out.nested = std::make_shared<QueryAst>(std::move(inner));
          break;
        }
        case ReturnNode::Kind::Text:
          break;
      }
      return out;
    }
  } w{env, own_vars};

  for (const auto& n : q.ret) out.ret.push_back(w.walk(n));
  return out;
}

// ---------------------------------------------------------------------------
// Canonization

struct LevelBuild {
  const QueryAst* ast = nullptr;
  LevelBuild* parent = nullptr;
  std::string id;
  std::string range_var;
  int base_depth = 0;
  int max_depth = 0;
  std::vector<std::string> vars;
  std::map<std::string, int> depth;
  // Column buckets per variable, discovery order, deduplicated at assembly.
  std::map<std::string, std::vector<std::vector<std::string>>> corr, join, ph;
  std::vector<OrGroup> where;
  std::vector<TemplateNode> tpl;
};

class Canonizer {
 public:
  explicit Canonizer(const QueryAst& q) : root_ast_(q) {}

  CanonicalForm run() {
    build_level(root_ast_, nullptr);
    CanonicalForm out;
    out.hints = root_ast_.hints;
    for (auto& lb : levels_) out.queries.push_back(assemble(*lb));
    out.recon = wrap_scopes(levels_.front()->tpl, 0);
    out.vars = vars_;
    return out;
  }

 private:
  LevelBuild* build_level(const QueryAst& q, LevelBuild* parent) {
    levels_.push_back(std::make_unique<LevelBuild>());
    LevelBuild* lb = levels_.back().get();
    lb->ast = &q;
    lb->parent = parent;
    lb->id = "t" + std::to_string(++id_counter_);
    lb->base_depth = parent ? parent->max_depth + 1 : 0;

    int i = 0;
    for (const auto& f : q.fors) {
      if (!f.over_collection) {
        throw PlanError("frontend: for $" + f.var +
                        " ranges over a variable; only collection sources "
                        "can be decomposed");
      }
      lb->vars.push_back(f.var);
      // Top-level variables all emit per result document; each additional
      // variable of a nested query opens one deeper member group.
      int d = parent ? lb->base_depth + i : 0;
      lb->depth[f.var] = d;
      lb->max_depth = std::max(lb->max_depth, d);
      VarInfo info;
      info.query_id = lb->id;
      info.depth = d;
      info.root = "*";
      if (!f.suffix.empty()) {
        std::string r;
        for (std::size_t k = 0; k < f.suffix.size(); ++k) {
          if (k) r += '/';
          r += f.suffix[k];
        }
        info.root = r;
      }
      vars_[f.var] = info;
      ++i;
    }
    if (parent) {
      std::string rv = "t";
      while (lb->depth.count(rv)) rv = "t" + rv;
      lb->range_var = rv;
    }

    for (const OrGroup& g : q.where) lb->where.push_back(rewrite_group(g, lb));
    for (const auto& n : q.ret) lb->tpl.push_back(walk_template(n, lb));
    return lb;
  }

  OrGroup rewrite_group(const OrGroup& g, LevelBuild* lb) {
    OrGroup out;
    for (const Atom& a0 : g.atoms) {
      Atom a = a0;
      bool refs_parent = false;
      auto fix = [&](VarPath& p) {
        if (lb->depth.count(p.var)) return;  // local
        if (lb->parent && lb->parent->depth.count(p.var)) {
          refs_parent = true;
          lb->parent->corr[p.var].push_back(p.rel);
          p = VarPath{lb->range_var, p.rel};
          return;
        }
        throw PlanError("frontend: $" + p.var +
                        " crosses more than one query level in a condition");
      };
      if (a.kind == Atom::Kind::Cmp) {
        if (a.lhs.kind == Operand::Kind::PathRef) fix(a.lhs.path);
        if (a.rhs.kind == Operand::Kind::PathRef) fix(a.rhs.path);
      } else {
        fix(a.cpath);
      }
      if (refs_parent) {
        // The local side of a correlation atom leads its variable's output.
        for_each_local_path(a, lb, [&](const VarPath& p) {
          lb->corr[p.var].push_back(p.rel);
        });
      } else {
        std::set<std::string> locals;
        collect_atom_vars(a, &locals);
        locals.erase(lb->range_var);
        if (locals.size() == 2) {
          for_each_local_path(a, lb, [&](const VarPath& p) {
            lb->join[p.var].push_back(p.rel);
          });
        }
      }
      out.atoms.push_back(std::move(a));
    }
    return out;
  }

  template <typename F>
  void for_each_local_path(const Atom& a, LevelBuild* lb, F f) {
    auto consider = [&](const VarPath& p) {
      if (lb->depth.count(p.var)) f(p);
    };
    if (a.kind == Atom::Kind::Cmp) {
      if (a.lhs.kind == Operand::Kind::PathRef) consider(a.lhs.path);
      if (a.rhs.kind == Operand::Kind::PathRef) consider(a.rhs.path);
    } else {
      consider(a.cpath);
    }
  }

  TemplateNode walk_template(const ReturnNode& n, LevelBuild* lb) {
    TemplateNode t;
    switch (n.kind) {
      case ReturnNode::Kind::Element:
        t.kind = TemplateNode::Kind::Element;
        t.tag = n.tag;
        for (const auto& c : n.children) {
          t.children.push_back(walk_template(c, lb));
        }
        break;
      case ReturnNode::Kind::Text:
        t.kind = TemplateNode::Kind::Text;
        t.text = n.text;
        break;
      case ReturnNode::Kind::Placeholder:
        t.kind = TemplateNode::Kind::Placeholder;
        t.path = n.path;
        record_placeholder(n.path, lb);
        break;
      case ReturnNode::Kind::Group:
        // A parenthesized sequence in a constructor context carries no
        // element of its own; its items splice into the parent.
        t.kind = TemplateNode::Kind::Element;
        t.tag = "";
        for (const auto& c : n.children) {
          t.children.push_back(walk_template(c, lb));
        }
        break;
      case ReturnNode::Kind::Aggregate:
        t.kind = TemplateNode::Kind::Placeholder;
        t.agg_fn = n.agg_fn;
        t.path = n.path;
        record_placeholder(n.path, lb);
        break;
      case ReturnNode::Kind::Nested: {
        LevelBuild* child = build_level(*n.nested, lb);
        t.kind = TemplateNode::Kind::Scope;
        t.level = child->base_depth;
        t.children = wrap_scopes(child->tpl, child->base_depth);
        break;
      }
    }
    return t;
  }

  void record_placeholder(const VarPath& p, LevelBuild* lb) {
    for (LevelBuild* l = lb; l; l = l->parent) {
      if (l->depth.count(p.var)) {
        l->ph[p.var].push_back(p.rel);
        return;
      }
    }
    throw PlanError("frontend: unknown variable $" + p.var + " in template");
  }

  int min_ph_depth(const TemplateNode& t) const {
    switch (t.kind) {
      case TemplateNode::Kind::Placeholder:
        if (!t.agg_fn.empty()) return 0;  // aggregates emit per result tuple
        return vars_.at(t.path.var).depth;
      case TemplateNode::Kind::Element: {
        int m = INT_MAX;
        for (const auto& c : t.children) m = std::min(m, min_ph_depth(c));
        return m;
      }
      case TemplateNode::Kind::Scope:
      case TemplateNode::Kind::Text:
        return INT_MAX;
    }
    return INT_MAX;
  }

  // Wraps maximal runs of strictly-deeper items in member scopes so that
  // reconstruction repeats them per group member.
  std::vector<TemplateNode> wrap_scopes(const std::vector<TemplateNode>& in,
                                        int d) {
    std::vector<TemplateNode> out;
    std::vector<TemplateNode> run;
    auto flush = [&] {
      if (run.empty()) return;
      TemplateNode s;
      s.kind = TemplateNode::Kind::Scope;
      s.level = d + 1;
      s.children = wrap_scopes(run, d + 1);
      out.push_back(std::move(s));
      run.clear();
    };
    for (const TemplateNode& t : in) {
      if (t.kind == TemplateNode::Kind::Scope) {
        flush();
        out.push_back(t);
        continue;
      }
      int md = min_ph_depth(t);
      if (md != INT_MAX && md >= d + 1) {
        run.push_back(t);
        continue;
      }
      flush();
      TemplateNode copy = t;
      if (copy.kind == TemplateNode::Kind::Element) {
        copy.children = wrap_scopes(copy.children, d);
      }
      out.push_back(std::move(copy));
    }
    flush();
    return out;
  }

  SimpleQuery assemble(LevelBuild& lb) {
    SimpleQuery sq;
    sq.id = lb.id;
    if (lb.parent) {
      SimpleFor f;
      f.var = lb.range_var;
      f.over_prior = true;
      f.prior_id = lb.parent->id;
      sq.fors.push_back(std::move(f));
    }
    for (const auto& f : lb.ast->fors) {
      SimpleFor sf;
      sf.var = f.var;
      sf.collection = f.collection;
      sf.suffix = f.suffix;
      sq.fors.push_back(std::move(sf));
    }
    sq.where = lb.where;

    auto items_of = [&](const std::string& v) {
      std::vector<ReturnItem> items;
      std::set<std::string> seen;
      auto add = [&](const std::vector<std::string>& rel) {
        std::string key;
        for (const auto& s : rel) key += "/" + s;
        if (!seen.insert(key).second) return;
        ReturnItem it;
        it.path = VarPath{v, rel};
        items.push_back(std::move(it));
      };
      for (const auto& r : lb.corr[v]) add(r);
      for (const auto& r : lb.join[v]) add(r);
      for (const auto& r : lb.ph[v]) add(r);
      return items;
    };

    if (!lb.parent) {
      for (const auto& v : lb.vars) {
        auto items = items_of(v);
        sq.ret.insert(sq.ret.end(), items.begin(), items.end());
      }
      return sq;
    }
    // First variable stays at this query's level; each later variable's
    // columns nest one group deeper.
    std::vector<ReturnItem> acc;
    for (auto it = lb.vars.rbegin(); it != lb.vars.rend(); ++it) {
      std::vector<ReturnItem> cur = items_of(*it);
      if (cur.empty()) continue;
      if (!acc.empty()) {
        ReturnItem g;
        g.is_group = true;
        g.group = std::move(acc);
        cur.push_back(std::move(g));
      }
      acc = std::move(cur);
    }
    sq.ret = std::move(acc);
    return sq;
  }

  const QueryAst& root_ast_;
  std::vector<std::unique_ptr<LevelBuild>> levels_;
  std::map<std::string, VarInfo> vars_;
  int id_counter_ = 0;
};

void print_ret_items(std::ostringstream& o, const std::vector<ReturnItem>& v) {
  o << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) o << ", ";
    if (v[i].is_group) {
      print_ret_items(o, v[i].group);
    } else {
      o << v[i].path.text();
    }
  }
  o << ')';
}

void print_template(std::ostringstream& o, const TemplateNode& t,
                    const CanonicalForm& c) {
  switch (t.kind) {
    case TemplateNode::Kind::Element:
      if (!t.tag.empty()) o << '<' << t.tag << '>';
      for (const auto& k : t.children) print_template(o, k, c);
      if (!t.tag.empty()) o << "</" << t.tag << '>';
      break;
    case TemplateNode::Kind::Text:
      o << t.text;
      break;
    case TemplateNode::Kind::Placeholder: {
      if (!t.agg_fn.empty()) {
        o << "aggregate(" << t.agg_fn << ", " << t.path.text() << ')';
        break;
      }
      // Variables of the outermost query print through its id when the
      // relative path picks a unique output column of that query.
      const VarInfo& vi = c.vars.at(t.path.var);
      if (!c.queries.empty() && vi.query_id == c.queries.front().id) {
        int same = 0;
        for (const auto& item : c.queries.front().ret) {
          if (!item.is_group && item.path.rel == t.path.rel) ++same;
        }
        if (same == 1) {
          VarPath p{vi.query_id, t.path.rel};
          o << p.text();
          break;
        }
      }
      o << t.path.text();
      break;
    }
    case TemplateNode::Kind::Scope:
      for (const auto& k : t.children) print_template(o, k, c);
      break;
  }
}

}  // namespace

std::string VarPath::text() const {
  std::string out = "$" + var;
  for (const auto& s : rel) out += "/" + s;
  return out;
}

QueryAst parse(const std::string& text) { return Parser(text).parse_top(); }

std::string pretty(const QueryAst& q) {
  std::ostringstream o;
  for (const auto& h : q.hints) {
    o << "(:: hint join=" << h.join_id << " algo=" << h.algo << " ::) ";
  }
  print_query(o, q);
  return o.str();
}

QueryAst normalize(const QueryAst& q) { return normalize_impl(q, {}); }

CanonicalForm canonize(const QueryAst& q) { return Canonizer(q).run(); }

std::string print_canonical(const CanonicalForm& c) {
  std::ostringstream o;
  for (const auto& sq : c.queries) {
    o << "let " << sq.id << " ::= ";
    for (std::size_t i = 0; i < sq.fors.size(); ++i) {
      if (i) o << ' ';
      const SimpleFor& f = sq.fors[i];
      o << "for $" << f.var << " in ";
      if (f.over_prior) {
        o << '$' << f.prior_id;
      } else {
        o << "Collection(\"" << f.collection << "\")";
        for (const auto& s : f.suffix) o << '/' << s;
      }
    }
    if (!sq.where.empty()) {
      o << " where ";
      print_cond(o, sq.where);
    }
    o << " return ";
    print_ret_items(o, sq.ret);
    o << '\n';
  }
  o << "reconstruct ";
  for (const auto& t : c.recon) print_template(o, t, c);
  o << '\n';
  return o.str();
}

}  // namespace xfed::frontend
