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

// Internal helpers shared by the forest-rewriting operators.

#ifndef XFED_SRC_FOREST_OPS_HPP
#define XFED_SRC_FOREST_OPS_HPP

#include <map>
#include <vector>

#include "xfed/xtree.hpp"

namespace xfed::detail {

struct PruneResult {
  std::vector<XTreePtr> forest;
  std::map<NodeRef, NodeRef> remap;  // old ref -> new ref (kept nodes only)
};

// Keeps, per tree, the nodes that are a kept ref, one of its ancestors, or
// inside its subtree; drops trees with no kept refs. Trees surviving intact
// are shared, not copied.
PruneResult prune_forest(const std::vector<XTreePtr>& forest,
                         const std::vector<NodeRef>& keep);

}  // namespace xfed::detail

#endif  // XFED_SRC_FOREST_OPS_HPP
