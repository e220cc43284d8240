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

#include "sgbdt/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace sgbdt {
namespace {

bool ParseDouble(absl::string_view s, double& out) {
  s = absl::StripAsciiWhitespace(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

absl::Status Dataset::AddRow(std::span<const double> x, double y) {
  if (!schema_) return absl::FailedPreconditionError("dataset has no schema");
  if (static_cast<int>(x.size()) != num_features()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "row has ", x.size(), " features, schema has ", num_features()));
  }
  if (!std::isfinite(y)) return absl::InvalidArgumentError("non-finite label");
  if (task() == Task::kClassification && y != 0.0 && y != 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("classification label must be 0 or 1, got ", y));
  }
  for (int f = 0; f < num_features(); ++f) {
    const FeatureSpec& spec = schema_->features[f];
    double v = x[f];
    if (spec.is_numerical()) {
      if (std::isnan(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("feature '", spec.name(), "' is NaN"));
      }
      v = spec.Clamp(v);
    } else if (v != std::floor(v) || v < 0 || v >= spec.num_values()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "feature '", spec.name(), "': invalid category code ", v));
    }
    x_.push_back(v);
  }
  y_.push_back(y);
  return absl::OkStatus();
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  Dataset out(schema_);
  const size_t m = static_cast<size_t>(num_features());
  out.x_.reserve(indices.size() * m);
  out.y_.reserve(indices.size());
  for (size_t i : indices) {
    std::span<const double> r = row(i);
    out.x_.insert(out.x_.end(), r.begin(), r.end());
    out.y_.push_back(y_[i]);
  }
  return out;
}

absl::StatusOr<Dataset> ParseCsv(const std::string& text,
                                 std::shared_ptr<const Schema> schema) {
  if (!schema) return absl::InvalidArgumentError("null schema");
  if (absl::Status s = schema->Validate(); !s.ok()) return s;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError("CSV has no header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = absl::StrSplit(line, ',');
  for (std::string& h : header) absl::StripAsciiWhitespace(&h);

  std::unordered_map<std::string, int> column_of;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate CSV column '", header[c], "'"));
    }
  }
  const int m = schema->num_features();
  if (static_cast<int>(header.size()) != m + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("CSV has ", header.size(), " columns, schema expects ",
                     m, " features plus label '", schema->label, "'"));
  }
  std::vector<int> feature_column(m);
  for (int f = 0; f < m; ++f) {
    auto it = column_of.find(schema->features[f].name());
    if (it == column_of.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "CSV lacks feature column '", schema->features[f].name(), "'"));
    }
    feature_column[f] = it->second;
  }
  auto label_it = column_of.find(schema->label);
  if (label_it == column_of.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("CSV lacks label column '", schema->label, "'"));
  }
  const int label_column = label_it->second;

  Dataset data(schema);
  std::vector<double> x(m);
  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    ++row;
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (cells.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", row, ": expected ", header.size(),
                       " cells, got ", cells.size()));
    }
    for (int f = 0; f < m; ++f) {
      const FeatureSpec& spec = schema->features[f];
      absl::string_view cell =
          absl::StripAsciiWhitespace(cells[feature_column[f]]);
      if (spec.is_numerical()) {
        if (!ParseDouble(cell, x[f])) {
          return absl::InvalidArgumentError(
              absl::StrCat("row ", row, ": cannot parse '", cell,
                           "' for feature '", spec.name(), "'"));
        }
      } else {
        std::optional<int> code =
            spec.CodeOf(std::string_view(cell.data(), cell.size()));
        if (!code) {
          return absl::InvalidArgumentError(
              absl::StrCat("row ", row, ": unknown category '", cell,
                           "' for feature '", spec.name(), "'"));
        }
        x[f] = *code;
      }
    }
    absl::string_view label_cell =
        absl::StripAsciiWhitespace(cells[label_column]);
    double y = 0.0;
    if (schema->task == Task::kClassification && schema->positive_label) {
      y = label_cell == *schema->positive_label ? 1.0 : 0.0;
    } else if (!ParseDouble(label_cell, y)) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", row, ": cannot parse label '", label_cell, "'"));
    }
    if (absl::Status s = data.AddRow(x, y); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", row, ": ", s.message()));
    }
  }
  return data;
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                std::shared_ptr<const Schema> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), std::move(schema));
}

}  // namespace sgbdt
