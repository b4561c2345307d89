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

#ifndef XFED_DATASET_HPP_
#define XFED_DATASET_HPP_

// Deterministic order-parts-suppliers dataset: eight collections shaped
// after the classic retail schema, grouped into trees, spread over sources
// A1..A7. The same definitions drive catalog registration, adapter stores,
// and the benchmark harness.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catalog.hpp"

namespace xfed::dataset {

struct CollectionSpec {
  std::string name;            // e.g. "NATION"
  std::string root;            // e.g. "nation"
  std::vector<Path> leaves;    // leaf paths; the guide closes them
  std::uint64_t base_cardinality = 0;  // tuple count at scale 1
};

const std::vector<CollectionSpec>& collections();
const CollectionSpec& collection(const std::string& name);

// Source layout: A1 PARTSUPP; A2 CUSTOMER+LINEITEM; A3 ORDERS; A4 SUPPLIER
// (suppkey lower half); A5 PART; A6 SUPPLIER (upper half) + NATION + REGION;
// A7 a copy of everything A1..A3 hold.
const std::map<std::string, std::vector<std::string>>& placements();

// Declared cardinality of one collection as served by one source (halved
// for the supplier partitions).
std::uint64_t placed_cardinality(const std::string& source_id,
                                 const std::string& collection, int scale);

SourceDescriptor descriptor(const std::string& source_id, Capability cap,
                            int scale, const std::string& transport = "");

struct Dataset {
  int scale = 1;
  std::uint64_t seed = 1;
  double iron_fraction = 0.2;
  // collection -> one XML document per tuple, key order
  std::map<std::string, std::vector<std::string>> docs;
  // source -> collection -> its slice of the documents
  std::map<std::string, std::map<std::string, std::vector<std::string>>>
      stores;
};

// Same seed, same bytes. Keys are 1-based and sequential; foreign keys are
// uniform over the referenced collection; exactly
// round(iron_fraction * nations) nation comments contain the token "iron".
Dataset generate(int scale, std::uint64_t seed, double iron_fraction = 0.2);

}  // namespace xfed::dataset

#endif  // XFED_DATASET_HPP_
