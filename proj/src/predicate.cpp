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

#include "xfed/predicate.hpp"

#include <algorithm>

namespace xfed {

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

PredicatePtr Predicate::always_true() {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::True;
  return p;
}

PredicatePtr Predicate::cmp(Path a, CmpOp op, Constant c) {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::CompareConst;
  p->attr = std::move(a);
  p->op = op;
  p->constant = std::move(c);
  return p;
}

PredicatePtr Predicate::cmp_attrs(Path a, CmpOp op, Path b) {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::CompareAttr;
  p->attr = std::move(a);
  p->op = op;
  p->attr2 = std::move(b);
  return p;
}

PredicatePtr Predicate::contains(Path a, std::string needle) {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::Contains;
  p->attr = std::move(a);
  p->constant = Constant::string(std::move(needle));
  return p;
}

PredicatePtr Predicate::in_set(Path a, std::vector<std::string> values) {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::InSet;
  p->attr = std::move(a);
  p->values = std::move(values);
  return p;
}

PredicatePtr Predicate::conj(std::vector<PredicatePtr> kids) {
  if (kids.empty()) return always_true();
  if (kids.size() == 1) return kids[0];
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::And;
  p->children = std::move(kids);
  return p;
}

PredicatePtr Predicate::disj(std::vector<PredicatePtr> kids) {
  if (kids.size() == 1) return kids[0];
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::Or;
  p->children = std::move(kids);
  return p;
}

PredicatePtr Predicate::negate(PredicatePtr kid) {
  auto p = std::make_shared<Predicate>();
  p->kind = Kind::Not;
  p->children = {std::move(kid)};
  return p;
}

static void collect_paths(const Predicate& p, std::vector<Path>& out) {
  auto add = [&out](const Path& x) {
    if (x.size() && std::find(out.begin(), out.end(), x) == out.end())
      out.push_back(x);
  };
  switch (p.kind) {
    case Predicate::Kind::CompareConst:
    case Predicate::Kind::Contains:
    case Predicate::Kind::InSet:
      add(p.attr);
      break;
    case Predicate::Kind::CompareAttr:
      add(p.attr);
      add(p.attr2);
      break;
    default:
      break;
  }
  for (const auto& c : p.children) collect_paths(*c, out);
}

std::vector<Path> Predicate::mentioned_paths() const {
  std::vector<Path> out;
  collect_paths(*this, out);
  return out;
}

PredicatePtr Predicate::with_rebased_roots(const std::string& from,
                                           const std::string& to) const {
  auto p = std::make_shared<Predicate>(*this);
  if (p->attr.size() && p->attr.root() == from) p->attr = p->attr.with_root(to);
  if (p->attr2.size() && p->attr2.root() == from) p->attr2 = p->attr2.with_root(to);
  std::vector<PredicatePtr> kids;
  kids.reserve(children.size());
  for (const auto& c : children) kids.push_back(c->with_rebased_roots(from, to));
  p->children = std::move(kids);
  return p;
}

namespace {

std::string render_path(const Path& p,
                        const std::map<std::string, std::string>& var_of_root) {
  auto it = var_of_root.find(p.root());
  if (it == var_of_root.end()) return p.text();
  std::string out = "$" + it->second;
  for (std::size_t i = 1; i < p.size(); ++i) out += "/" + p.steps()[i];
  return out;
}

std::string render_const(const Constant& c) {
  if (c.is_decimal) return c.text;
  return "\"" + c.text + "\"";
}

void render_rec(const Predicate& p,
                const std::map<std::string, std::string>& vars, bool parens,
                std::string& out) {
  switch (p.kind) {
    case Predicate::Kind::True:
      out += "true";
      return;
    case Predicate::Kind::CompareConst:
      out += render_path(p.attr, vars);
      out += " ";
      out += cmp_op_text(p.op);
      out += " ";
      out += render_const(p.constant);
      return;
    case Predicate::Kind::CompareAttr:
      out += render_path(p.attr, vars);
      out += " ";
      out += cmp_op_text(p.op);
      out += " ";
      out += render_path(p.attr2, vars);
      return;
    case Predicate::Kind::Contains:
      out += "contains(" + render_path(p.attr, vars) + ", \"" +
             p.constant.text + "\")";
      return;
    case Predicate::Kind::InSet: {
      out += render_path(p.attr, vars) + " in (";
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + p.values[i] + "\"";
      }
      out += ")";
      return;
    }
    case Predicate::Kind::Not:
      out += "not(";
      render_rec(*p.children[0], vars, false, out);
      out += ")";
      return;
    case Predicate::Kind::And: {
      if (parens) out += "(";
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += " and ";
        render_rec(*p.children[i], vars, true, out);
      }
      if (parens) out += ")";
      return;
    }
    case Predicate::Kind::Or: {
      if (parens) out += "(";
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += " or ";
        render_rec(*p.children[i], vars, true, out);
      }
      if (parens) out += ")";
      return;
    }
  }
}

}  // namespace

std::string Predicate::render(
    const std::map<std::string, std::string>& var_of_root) const {
  std::string out;
  render_rec(*this, var_of_root, false, out);
  return out;
}

int compare_values(const std::string& a, const std::string& b) {
  auto da = Decimal::parse(a);
  auto db = Decimal::parse(b);
  if (da && db) return da->compare(*db);
  return a < b ? -1 : a > b ? 1 : 0;
}

namespace {

bool apply_op(CmpOp op, int c) {
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
  }
  return false;
}

bool is_ordering(CmpOp op) {
  return op == CmpOp::Lt || op == CmpOp::Le || op == CmpOp::Gt || op == CmpOp::Ge;
}

// All binding positions of path p, in schema order.
void positions_of(const XRelationSchema& s, const Path& p,
                  std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < s.attributes.size(); ++i)
    if (s.attributes[i] == p) out.push_back(i);
}

std::string value_of(const XTuple& t, const NodeRef& r) {
  return t.forest[r.tree]->string_value(r.node);
}

}  // namespace

bool eval_predicate(const Predicate& p, const XRelationSchema& schema,
                    const XTuple& t, Diagnostics* diag) {
  switch (p.kind) {
    case Predicate::Kind::True:
      return true;
    case Predicate::Kind::And:
      for (const auto& c : p.children)
        if (!eval_predicate(*c, schema, t, diag)) return false;
      return true;
    case Predicate::Kind::Or:
      for (const auto& c : p.children)
        if (eval_predicate(*c, schema, t, diag)) return true;
      return false;
    case Predicate::Kind::Not:
      return !eval_predicate(*p.children[0], schema, t, diag);
    case Predicate::Kind::CompareConst: {
      std::vector<std::size_t> pos;
      positions_of(schema, p.attr, pos);
      std::optional<Decimal> rhs_dec;
      if (p.constant.is_decimal) rhs_dec = Decimal::parse(p.constant.text);
      bool numeric = is_ordering(p.op) && rhs_dec.has_value();
      for (std::size_t i : pos) {
        for (const NodeRef& r : t.refs(i)) {
          std::string v = value_of(t, r);
          if (numeric) {
            auto dv = Decimal::parse(v);
            if (!dv) {
              if (diag) ++diag->non_numeric_under_numeric_cmp;
              continue;
            }
            if (apply_op(p.op, dv->compare(*rhs_dec))) return true;
          } else {
            if (apply_op(p.op, compare_values(v, p.constant.text))) return true;
          }
        }
      }
      return false;
    }
    case Predicate::Kind::CompareAttr: {
      std::vector<std::size_t> lpos, rpos;
      positions_of(schema, p.attr, lpos);
      positions_of(schema, p.attr2, rpos);
      bool same_path = p.attr == p.attr2;
      for (std::size_t li : lpos) {
        for (std::size_t ri : rpos) {
          if (same_path && li == ri && lpos.size() > 1) continue;
          for (const NodeRef& a : t.refs(li)) {
            for (const NodeRef& b : t.refs(ri)) {
              // Same-path compare must range over distinct sides: distinct
              // bindings, or distinct nodes when only one binding exists.
              if (same_path && li == ri && a == b) continue;
              if (apply_op(p.op, compare_values(value_of(t, a), value_of(t, b))))
                return true;
            }
          }
        }
      }
      return false;
    }
    case Predicate::Kind::Contains: {
      std::vector<std::size_t> pos;
      positions_of(schema, p.attr, pos);
      for (std::size_t i : pos)
        for (const NodeRef& r : t.refs(i))
          if (value_of(t, r).find(p.constant.text) != std::string::npos)
            return true;
      return false;
    }
    case Predicate::Kind::InSet: {
      std::vector<std::size_t> pos;
      positions_of(schema, p.attr, pos);
      for (std::size_t i : pos)
        for (const NodeRef& r : t.refs(i)) {
          std::string v = value_of(t, r);
          for (const auto& k : p.values)
            if (compare_values(v, k) == 0) return true;
        }
      return false;
    }
  }
  return false;
}

}  // namespace xfed
