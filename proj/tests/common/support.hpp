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

// Shared test helpers: relation builders over XML text, canonical multiset
// views, and an independent scaled-integer decimal oracle for aggregates.

#ifndef XFED_TESTS_SUPPORT_HPP
#define XFED_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "xfed/operators.hpp"
#include "xfed/xml.hpp"
#include "xfed/xtuple.hpp"

namespace xfed::test {

// Builds a relation directly from parsed documents; each entry of `docs` is
// one tuple's forest (several top-level elements allowed in one string).
// The guide is inferred from the documents plus the attribute paths, so the
// structural validator sees exactly what a registered source would declare.
inline XRelation rel_forest(const std::vector<std::string>& docs,
                            const std::vector<std::string>& attrs) {
  XRelation r;
  std::vector<Path> paths;
  for (const std::string& a : attrs) {
    Path p = Path::parse(a);
    r.schema.attributes.push_back(p);
    paths.push_back(p);
  }
  std::vector<std::vector<XTreePtr>> forests;
  for (const std::string& d : docs) {
    std::vector<XTreePtr> forest = parse_document(d);
    for (const XTreePtr& t : forest)
      for (NodeId id : t->preorder()) paths.push_back(t->path_of(id));
    forests.push_back(std::move(forest));
  }
  r.schema.guide = make_guide(paths);
  for (std::vector<XTreePtr>& forest : forests) {
    XTuple t;
    t.forest = std::move(forest);
    t.bindings.resize(r.schema.attributes.size());
    for (std::size_t i = 0; i < r.schema.attributes.size(); ++i)
      for (std::uint32_t ti = 0; ti < t.forest.size(); ++ti)
        for (NodeId id : t.forest[ti]->find(r.schema.attributes[i]))
          t.bindings[i].push_back({ti, id});
    r.tuples.push_back(std::move(t));
  }
  r.ordered = true;
  return r;
}

inline std::multiset<std::string> keys(const XRelation& r) {
  std::multiset<std::string> out;
  for (const XTuple& t : r.tuples) out.insert(canonical_tuple_key(r.schema, t));
  return out;
}

inline std::vector<std::string> keys_in_order(const XRelation& r) {
  std::vector<std::string> out;
  for (const XTuple& t : r.tuples) out.push_back(canonical_tuple_key(r.schema, t));
  return out;
}

// First bound value of an attribute in one tuple, empty when absent.
inline std::string val(const XRelation& r, std::size_t tuple,
                       const std::string& attr) {
  auto pos = r.attr_pos(Path::parse(attr));
  if (!pos) return "";
  const std::vector<NodeRef>& refs = r.tuples[tuple].refs(*pos);
  if (refs.empty()) return "";
  return r.tuples[tuple].forest[refs[0].tree]->string_value(refs[0].node);
}

inline std::size_t violations(const XRelation& r) {
  return validate_relation(r).size();
}

namespace oracle {

// Decimal oracle on scaled 128-bit integers; deliberately a different
// algorithm family than the engine's digit-string arithmetic.
struct Num {
  __int128 units = 0;
  int scale = 0;
};

inline std::optional<Num> parse(const std::string& s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  std::string digits;
  int scale = 0;
  bool dot = false, any = false;
  for (; i < s.size(); ++i) {
    if (s[i] == '.') {
      if (dot) return std::nullopt;
      dot = true;
      continue;
    }
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    digits += s[i];
    if (dot) ++scale;
    any = true;
  }
  if (!any || digits.size() > 30) return std::nullopt;
  Num n;
  n.scale = scale;
  for (char c : digits) n.units = n.units * 10 + (c - '0');
  if (neg) n.units = -n.units;
  return n;
}

inline Num rescale(Num n, int scale) {
  while (n.scale < scale) {
    n.units *= 10;
    ++n.scale;
  }
  return n;
}

inline Num add(Num a, Num b) {
  int s = a.scale > b.scale ? a.scale : b.scale;
  a = rescale(a, s);
  b = rescale(b, s);
  return {a.units + b.units, s};
}

inline std::string to_string(Num n) {
  bool neg = n.units < 0;
  __int128 u = neg ? -n.units : n.units;
  std::string digits;
  if (u == 0) digits = "0";
  while (u > 0) {
    digits += char('0' + (int)(u % 10));
    u /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  while ((int)digits.size() <= n.scale) digits.insert(digits.begin(), '0');
  std::string ip = digits.substr(0, digits.size() - n.scale);
  std::string fp = digits.substr(digits.size() - n.scale);
  while (!fp.empty() && fp.back() == '0') fp.pop_back();
  std::string out = neg && (ip != "0" || !fp.empty()) ? "-" : "";
  out += ip;
  if (!fp.empty()) out += "." + fp;
  return out;
}

// Division by a positive count: exact up to 12 fractional digits, else
// rounded half up at 12.
inline Num div(Num a, long long n) {
  Num w = rescale(a, 12);
  bool neg = w.units < 0;
  __int128 u = neg ? -w.units : w.units;
  __int128 q = u / n, rem = u % n;
  if (rem * 2 >= n) ++q;
  return {neg ? -q : q, 12};
}

}  // namespace oracle

// Deterministic generator for the law suite; values are drawn from a small
// pool so joins and groupings collide often.
struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int irand(int lo, int hi) {  // inclusive
    return (int)(rng() % (std::uint64_t)(hi - lo + 1)) + lo;
  }

  std::string value() {
    static const char* pool[] = {"1",  "2",   "3",        "5",  "5.0",
                                 "7",  "10",  "iron ore", "x",  "b7",
                                 "45", "4.5", "-2",       "2.0"};
    return pool[irand(0, 13)];
  }

  // One document: a root with leaf children per requested step, some
  // repeated (multi-valued), some missing, occasionally nested one level.
  // single_valued forces exactly one copy of every leaf and no extras.
  std::string doc(const std::string& root, const std::vector<std::string>& leaves,
                  bool single_valued = false) {
    std::string out = "<" + root + ">";
    for (const std::string& l : leaves) {
      int copies = single_valued ? 1
                   : irand(0, 10) == 0 ? 2
                   : irand(0, 12) == 0 ? 0
                                       : 1;
      for (int c = 0; c < copies; ++c)
        out += "<" + l + ">" + escape_text(value()) + "</" + l + ">";
    }
    if (!single_valued && irand(0, 5) == 0)
      out += "<extra><deep>" + value() + "</deep></extra>";
    out += "</" + root + ">";
    return out;
  }

  XRelation relation(const std::string& root, int ntuples,
                     const std::vector<std::string>& leaves,
                     bool single_valued = false) {
    std::vector<std::string> docs;
    std::vector<std::string> attrs;
    for (const std::string& l : leaves) attrs.push_back(root + "/" + l);
    for (int i = 0; i < ntuples; ++i)
      docs.push_back(doc(root, leaves, single_valued));
    return rel_forest(docs, attrs);
  }
};

}  // namespace xfed::test

#endif  // XFED_TESTS_SUPPORT_HPP
