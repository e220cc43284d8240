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

#ifndef SGBDT_DATASET_H_
#define SGBDT_DATASET_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sgbdt/schema.h"

namespace sgbdt {

// Row-major feature matrix with labels. Categorical values are stored as
// their integer code (as a double) so that a row is a flat vector of reals.
// The schema is shared, so subsets and folds are cheap to create.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::shared_ptr<const Schema> schema)
      : schema_(std::move(schema)) {}

  // Validates and appends a row. Numerical values are clamped into their
  // border; categorical codes must be integral and in range.
  absl::Status AddRow(std::span<const double> x, double y);

  // Index-based subset sharing this dataset's schema.
  Dataset Subset(std::span<const size_t> indices) const;

  size_t size() const { return y_.size(); }
  bool empty() const { return y_.empty(); }
  int num_features() const { return schema_ ? schema_->num_features() : 0; }
  const Schema& schema() const { return *schema_; }
  std::shared_ptr<const Schema> shared_schema() const { return schema_; }
  Task task() const { return schema_->task; }

  std::span<const double> row(size_t i) const {
    const size_t m = static_cast<size_t>(num_features());
    return {x_.data() + i * m, m};
  }
  double at(size_t i, int feature) const {
    return x_[i * static_cast<size_t>(num_features()) + feature];
  }
  double label(size_t i) const { return y_[i]; }
  const std::vector<double>& labels() const { return y_; }

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<double> x_;
  std::vector<double> y_;
};

// Parses CSV text with a header row. Columns are matched to schema features
// by name; the header must contain exactly the schema features plus the
// label column. Errors name the 1-based data row.
absl::StatusOr<Dataset> ParseCsv(const std::string& text,
                                 std::shared_ptr<const Schema> schema);

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                std::shared_ptr<const Schema> schema);

}  // namespace sgbdt

#endif  // SGBDT_DATASET_H_
