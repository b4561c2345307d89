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

#include "xfed/operators.hpp"

namespace xfed {

SetOpStream::SetOpStream(TupleStreamPtr l, TupleStreamPtr r, SetOpKind kind)
    : left_(std::move(l)), right_(std::move(r)), kind_(kind) {
  if (left_->schema().attributes != right_->schema().attributes)
    throw PlanError("set operator: attribute lists differ");
  schema_.attributes = left_->schema().attributes;
  schema_.guide = guide_union(left_->schema().guide, right_->schema().guide);
  ordered_ = true;  // first-occurrence order is deterministic
}

std::optional<XTuple> SetOpStream::next() {
  if (kind_ != SetOpKind::Union && !right_ready_) {
    while (auto t = right_->next())
      right_keys_.insert(canonical_tuple_key(right_->schema(), *t));
    right_ready_ = true;
  }
  if (!left_done_) {
    while (auto t = left_->next()) {
      std::string key = canonical_tuple_key(left_->schema(), *t);
      if (!seen_.insert(key).second) continue;
      switch (kind_) {
        case SetOpKind::Union:
          return checked(std::move(*t));
        case SetOpKind::Difference:
          if (!right_keys_.count(key)) return checked(std::move(*t));
          break;
        case SetOpKind::Intersection:
          if (right_keys_.count(key)) return checked(std::move(*t));
          break;
      }
    }
    left_done_ = true;
  }
  if (kind_ == SetOpKind::Union) {
    while (auto t = right_->next()) {
      std::string key = canonical_tuple_key(right_->schema(), *t);
      if (seen_.insert(key).second) return checked(std::move(*t));
    }
  }
  return std::nullopt;
}

XRelation x_union(const XRelation& l, const XRelation& r) {
  SetOpStream s(std::make_unique<VectorTupleStream>(l),
                std::make_unique<VectorTupleStream>(r), SetOpKind::Union);
  return materialize(s);
}

XRelation x_difference(const XRelation& l, const XRelation& r) {
  SetOpStream s(std::make_unique<VectorTupleStream>(l),
                std::make_unique<VectorTupleStream>(r), SetOpKind::Difference);
  return materialize(s);
}

XRelation x_intersection(const XRelation& l, const XRelation& r) {
  SetOpStream s(std::make_unique<VectorTupleStream>(l),
                std::make_unique<VectorTupleStream>(r),
                SetOpKind::Intersection);
  return materialize(s);
}

}  // namespace xfed
