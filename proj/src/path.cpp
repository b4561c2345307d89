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

#include "xfed/path.hpp"

namespace xfed {

namespace {

bool step_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool step_char(char c) {
  return step_start(c) || (c >= '0' && c <= '9') || c == '-';
}

std::string join_steps(const std::vector<std::string>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out.push_back('/');
    out += steps[i];
  }
  return out;
}

}  // namespace

bool is_valid_step(std::string_view step) {
  if (step == "*") return true;
  if (step.empty() || !step_start(step[0])) return false;
  for (char c : step)
    if (!step_char(c)) return false;
  return true;
}

Path::Path(std::vector<std::string> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw std::invalid_argument("path: no steps");
  for (const auto& s : steps_)
    if (!is_valid_step(s)) throw std::invalid_argument("path: bad step '" + s + "'");
  text_ = join_steps(steps_);
}

Path Path::parse(std::string_view text) {
  std::vector<std::string> steps;
  std::string cur;
  for (char c : text) {
    if (c == '/') {
      steps.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  steps.push_back(cur);
  return Path(std::move(steps));
}

bool Path::has_joker() const {
  for (const auto& s : steps_)
    if (s == "*") return true;
  return false;
}

bool Path::is_prefix_of(const Path& other) const {
  if (steps_.size() > other.steps_.size()) return false;
  for (std::size_t i = 0; i < steps_.size(); ++i)
    if (steps_[i] != other.steps_[i]) return false;
  return true;
}

Path Path::parent() const {
  std::vector<std::string> s(steps_.begin(), steps_.end() - 1);
  return Path(std::move(s));
}

Path Path::child(std::string_view step) const {
  std::vector<std::string> s = steps_;
  s.emplace_back(step);
  return Path(std::move(s));
}

Path Path::with_root(std::string_view new_root) const {
  std::vector<std::string> s = steps_;
  s[0] = std::string(new_root);
  return Path(std::move(s));
}

bool Path::matches(const Path& concrete) const {
  if (steps_.size() != concrete.steps_.size()) return false;
  for (std::size_t i = 0; i < steps_.size(); ++i)
    if (steps_[i] != "*" && steps_[i] != concrete.steps_[i]) return false;
  return true;
}

}  // namespace xfed
