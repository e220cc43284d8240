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

#ifndef SGBDT_TREE_H_
#define SGBDT_TREE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/schema.h"

namespace sgbdt {

// One internal node. Numerical splits send x <= value left; categorical splits
// send x == value (the category code) left.
struct Split {
  int feature = 0;
  double value = 0.0;
  bool categorical = false;

  bool GoesLeft(double x) const {
    return categorical ? x == value : x <= value;
  }
  bool operator==(const Split&) const = default;
};

// Complete binary tree of fixed depth stored in heap order: node k has
// children 2k+1 and 2k+2; the 2^d leaves follow the 2^d - 1 internal nodes.
class Tree {
 public:
  Tree() = default;
  // Depth d >= 0 with all splits defaulted and leaves zero.
  explicit Tree(int depth);

  int depth() const { return depth_; }
  size_t num_splits() const { return splits_.size(); }
  size_t num_leaves() const { return leaves_.size(); }

  std::vector<Split>& splits() { return splits_; }
  const std::vector<Split>& splits() const { return splits_; }
  std::vector<double>& leaves() { return leaves_; }
  const std::vector<double>& leaves() const { return leaves_; }

  // Index in [0, 2^d) of the leaf that x is routed to.
  size_t LeafIndex(std::span<const double> x) const;
  double Evaluate(std::span<const double> x) const {
    return leaves_[LeafIndex(x)];
  }

  // Same splits (shape and thresholds), leaves ignored.
  bool SameStructure(const Tree& other) const {
    return depth_ == other.depth_ && splits_ == other.splits_;
  }

  nlohmann::json ToJson() const;
  static absl::StatusOr<Tree> FromJson(const nlohmann::json& j);

 private:
  int depth_ = 0;
  std::vector<Split> splits_;
  std::vector<double> leaves_;
};

}  // namespace sgbdt

#endif  // SGBDT_TREE_H_
