// Copyright 2026 The sgbdt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sgbdt/tree.h"

#include <bit>

#include "absl/strings/str_cat.h"

namespace sgbdt {

Tree::Tree(int depth)
    : depth_(depth),
      splits_((size_t{1} << depth) - 1),
      leaves_(size_t{1} << depth, 0.0) {}

size_t Tree::LeafIndex(std::span<const double> x) const {
  size_t node = 0;
  for (int level = 0; level < depth_; ++level) {
    const Split& s = splits_[node];
    node = 2 * node + (s.GoesLeft(x[s.feature]) ? 1 : 2);
  }
  return node - splits_.size();
}

nlohmann::json Tree::ToJson() const {
  nlohmann::json j;
  j["depth"] = depth_;
  j["splits"] = nlohmann::json::array();
  for (const Split& s : splits_) {
    j["splits"].push_back({{"feature", s.feature},
                           {"value", s.value},
                           {"op", s.categorical ? "==" : "<="}});
  }
  j["leaves"] = leaves_;
  return j;
}

absl::StatusOr<Tree> Tree::FromJson(const nlohmann::json& j) {
  try {
    const int depth = j.at("depth").get<int>();
    if (depth < 0 || depth > 30) {
      return absl::InvalidArgumentError(absl::StrCat("bad tree depth ", depth));
    }
    Tree tree(depth);
    const nlohmann::json& splits = j.at("splits");
    const nlohmann::json& leaves = j.at("leaves");
    if (splits.size() != tree.num_splits() ||
        leaves.size() != tree.num_leaves()) {
      return absl::InvalidArgumentError("tree is not complete for its depth");
    }
    for (size_t k = 0; k < splits.size(); ++k) {
      Split& s = tree.splits_[k];
      s.feature = splits[k].at("feature").get<int>();
      s.value = splits[k].at("value").get<double>();
      s.categorical = splits[k].at("op").get<std::string>() == "==";
    }
    tree.leaves_ = leaves.get<std::vector<double>>();
    return tree;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed tree: ", e.what()));
  }
}

}  // namespace sgbdt
