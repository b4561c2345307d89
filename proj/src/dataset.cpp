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

#include "xfed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "xfed/decimal.hpp"
#include "xfed/xtree.hpp"

namespace xfed::dataset {

namespace {

std::vector<Path> paths(std::initializer_list<const char*> texts) {
  std::vector<Path> out;
  for (const char* t : texts) out.push_back(Path::parse(t));
  return out;
}

}  // namespace

const std::vector<CollectionSpec>& collections() {
  static const std::vector<CollectionSpec> specs = {
      {"NATION", "nation",
       paths({"nation/nationkey", "nation/name", "nation/regionkey",
              "nation/comment"}),
       25},
      {"REGION", "region",
       paths({"region/regionkey", "region/name", "region/comment"}), 5},
      {"SUPPLIER", "supplier",
       paths({"supplier/id/suppkey", "supplier/name",
              "supplier/contact/phone",
              "supplier/contact/localisation/nationkey",
              "supplier/comment"}),
       100},
      {"PART", "part", paths({"part/partkey", "part/name", "part/comment"}),
       200},
      {"PARTSUPP", "partsupp",
       paths({"partsupp/partkey", "partsupp/suppkey", "partsupp/availqty",
              "partsupp/supplycost"}),
       800},
      {"CUSTOMER", "customer",
       paths({"customer/custkey", "customer/name", "customer/nationkey",
              "customer/comment"}),
       150},
      {"ORDERS", "orders",
       paths({"orders/orderkey", "orders/custkey", "orders/comment"}), 1500},
      {"LINEITEM", "lineitem",
       paths({"lineitem/orderkey", "lineitem/partkey", "lineitem/suppkey",
              "lineitem/comment"}),
       6000},
  };
  return specs;
}

const CollectionSpec& collection(const std::string& name) {
  for (const CollectionSpec& c : collections())
    if (c.name == name) return c;
  throw PlanError("dataset: unknown collection " + name);
}

const std::map<std::string, std::vector<std::string>>& placements() {
  static const std::map<std::string, std::vector<std::string>> p = {
      {"A1", {"PARTSUPP"}},
      {"A2", {"CUSTOMER", "LINEITEM"}},
      {"A3", {"ORDERS"}},
      {"A4", {"SUPPLIER"}},
      {"A5", {"PART"}},
      {"A6", {"SUPPLIER", "NATION", "REGION"}},
      {"A7", {"PARTSUPP", "CUSTOMER", "LINEITEM", "ORDERS"}},
  };
  return p;
}

std::uint64_t placed_cardinality(const std::string& source_id,
                                 const std::string& collection_name,
                                 int scale) {
  std::uint64_t n = collection(collection_name).base_cardinality *
                    (std::uint64_t)scale;
  if (collection_name == "SUPPLIER") {
    std::uint64_t lower = (n + 1) / 2;
    return source_id == "A4" ? lower : n - lower;
  }
  return n;
}

SourceDescriptor descriptor(const std::string& source_id, Capability cap,
                            int scale, const std::string& transport) {
  auto it = placements().find(source_id);
  if (it == placements().end())
    throw PlanError("dataset: unknown source " + source_id);
  SourceDescriptor d;
  d.id = source_id;
  d.capability = cap;
  d.transport = transport;
  for (const std::string& cname : it->second) {
    const CollectionSpec& spec = collection(cname);
    CollectionMetadata m;
    m.name = cname;
    m.guide = make_guide(spec.leaves);
    m.cardinality = placed_cardinality(source_id, cname, scale);
    d.collections.push_back(std::move(m));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {  // inclusive
    return lo + rng_() % (hi - lo + 1);
  }

  std::string words(int lo, int hi) {
    static const char* pool[] = {
        "final",    "pending",  "furious", "quiet",   "regular", "express",
        "deposits", "accounts", "requests", "ideas",  "packages", "pearls",
        "slyly",    "carefully", "quickly", "blithely", "about",  "above",
        "against",  "along",    "asymptotes", "theodolites", "platelets",
        "foxes"};
    int n = (int)uniform((std::uint64_t)lo, (std::uint64_t)hi);
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += pool[uniform(0, sizeof(pool) / sizeof(pool[0]) - 1)];
    }
    return out;
  }

  std::string phone() {
    std::string out = std::to_string(uniform(10, 34));
    for (int g = 0; g < 3; ++g)
      out += "-" + std::to_string(uniform(100, 999));
    return out;
  }

  std::string cost() {
    return Decimal((__int128)uniform(100, 99999), 2).to_string();
  }

  std::mt19937_64& raw() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

std::string elem(const std::string& tag, const std::string& text) {
  return "<" + tag + ">" + escape_text(text) + "</" + tag + ">";
}

std::string elem_n(const std::string& tag, std::uint64_t n) {
  return elem(tag, std::to_string(n));
}

}  // namespace

Dataset generate(int scale, std::uint64_t seed, double iron_fraction) {
  Dataset ds;
  ds.scale = scale;
  ds.seed = seed;
  ds.iron_fraction = iron_fraction;
  Gen g(seed);

  auto count = [&](const char* name) {
    return collection(name).base_cardinality * (std::uint64_t)scale;
  };
  const std::uint64_t nregion = count("REGION"), nnation = count("NATION"),
                      nsupp = count("SUPPLIER"), npart = count("PART"),
                      npartsupp = count("PARTSUPP"), ncust = count("CUSTOMER"),
                      norder = count("ORDERS"), nline = count("LINEITEM");

  static const char* region_names[] = {"AFRICA", "AMERICA", "ASIA", "EUROPE",
                                       "MIDDLE EAST"};
  for (std::uint64_t r = 1; r <= nregion; ++r)
    ds.docs["REGION"].push_back(
        "<region>" + elem_n("regionkey", r) +
        elem("name", region_names[(r - 1) % 5]) +
        elem("comment", g.words(3, 7)) + "</region>");

  // Exactly round(fraction * nations) comments carry the token, chosen by a
  // seeded shuffle so the subset varies with the seed but never in size.
  std::vector<std::uint64_t> iron_pick(nnation);
  for (std::uint64_t i = 0; i < nnation; ++i) iron_pick[i] = i + 1;
  std::shuffle(iron_pick.begin(), iron_pick.end(), g.raw());
  std::size_t n_iron = (std::size_t)std::llround(
      std::clamp(iron_fraction, 0.0, 1.0) * (double)nnation);
  std::set<std::uint64_t> iron(iron_pick.begin(),
                               iron_pick.begin() + (std::ptrdiff_t)n_iron);
  for (std::uint64_t n = 1; n <= nnation; ++n) {
    std::string comment = g.words(2, 4);
    if (iron.count(n)) comment += " iron " + g.words(1, 2);
    ds.docs["NATION"].push_back(
        "<nation>" + elem_n("nationkey", n) +
        elem("name", "Nation#" + std::to_string(n)) +
        elem_n("regionkey", nregion ? g.uniform(1, nregion) : 0) +
        elem("comment", comment) + "</nation>");
  }

  for (std::uint64_t s = 1; s <= nsupp; ++s)
    ds.docs["SUPPLIER"].push_back(
        "<supplier><id>" + elem_n("suppkey", s) + "</id>" +
        elem("name", "Supplier#" + std::to_string(s)) + "<contact>" +
        elem("phone", g.phone()) + "<localisation>" +
        elem_n("nationkey", nnation ? g.uniform(1, nnation) : 0) +
        "</localisation></contact>" + elem("comment", g.words(2, 5)) +
        "</supplier>");

  for (std::uint64_t p = 1; p <= npart; ++p)
    ds.docs["PART"].push_back("<part>" + elem_n("partkey", p) +
                              elem("name", g.words(2, 3)) +
                              elem("comment", g.words(2, 5)) + "</part>");

  std::set<std::pair<std::uint64_t, std::uint64_t>> seen_ps;
  for (std::uint64_t i = 0; i < npartsupp; ++i) {
    std::uint64_t pk = 0, sk = 0;
    do {
      pk = npart ? g.uniform(1, npart) : 0;
      sk = nsupp ? g.uniform(1, nsupp) : 0;
    } while (npart * nsupp > npartsupp && !seen_ps.insert({pk, sk}).second);
    ds.docs["PARTSUPP"].push_back(
        "<partsupp>" + elem_n("partkey", pk) + elem_n("suppkey", sk) +
        elem_n("availqty", g.uniform(1, 100)) + elem("supplycost", g.cost()) +
        "</partsupp>");
  }

  for (std::uint64_t c = 1; c <= ncust; ++c)
    ds.docs["CUSTOMER"].push_back(
        "<customer>" + elem_n("custkey", c) +
        elem("name", "Customer#" + std::to_string(c)) +
        elem_n("nationkey", nnation ? g.uniform(1, nnation) : 0) +
        elem("comment", g.words(2, 5)) + "</customer>");

  for (std::uint64_t o = 1; o <= norder; ++o)
    ds.docs["ORDERS"].push_back(
        "<orders>" + elem_n("orderkey", o) +
        elem_n("custkey", ncust ? g.uniform(1, ncust) : 0) +
        elem("comment", g.words(3, 6)) + "</orders>");

  for (std::uint64_t l = 0; l < nline; ++l)
    ds.docs["LINEITEM"].push_back(
        "<lineitem>" + elem_n("orderkey", norder ? g.uniform(1, norder) : 0) +
        elem_n("partkey", npart ? g.uniform(1, npart) : 0) +
        elem_n("suppkey", nsupp ? g.uniform(1, nsupp) : 0) +
        elem("comment", g.words(2, 5)) + "</lineitem>");

  // Slice into the A1..A7 stores. SUPPLIER splits by suppkey: lower half to
  // A4, the rest to A6.
  const std::uint64_t supp_lower = (nsupp + 1) / 2;
  for (const auto& [src, colls] : placements()) {
    for (const std::string& cname : colls) {
      const auto& all = ds.docs[cname];
      auto& slice = ds.stores[src][cname];
      if (cname == "SUPPLIER") {
        if (src == "A4")
          slice.assign(all.begin(), all.begin() + (std::ptrdiff_t)supp_lower);
        else
          slice.assign(all.begin() + (std::ptrdiff_t)supp_lower, all.end());
      } else {
        slice = all;
      }
    }
  }
  return ds;
}

}  // namespace xfed::dataset
