#!/usr/bin/env python3
# Copyright 2026 The sgbdt Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Merges the UCI Adult files adult.data and adult.test into one CSV.

Usage: prepare_adult.py ADULT_DATA ADULT_TEST OUT_CSV

Whitespace around cells and the trailing '.' on test labels are removed.
Missing values ('?') are kept as their own category.
"""

import csv
import sys

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num",
    "marital_status", "occupation", "relationship", "race", "sex",
    "capital_gain", "capital_loss", "hours_per_week", "native_country",
    "income",
]


def rows(path):
  with open(path) as f:
    for line in f:
      line = line.strip()
      if not line or line.startswith("|"):
        continue
      cells = [c.strip() for c in line.split(",")]
      if len(cells) != len(COLUMNS):
        raise ValueError(f"{path}: bad row {line!r}")
      cells[-1] = cells[-1].rstrip(".")
      yield cells


def main(argv):
  if len(argv) != 4:
    sys.exit(__doc__)
  with open(argv[3], "w", newline="") as out:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    n = 0
    for path in argv[1:3]:
      for r in rows(path):
        writer.writerow(r)
        n += 1
  print(f"wrote {n} rows to {argv[3]}")


if __name__ == "__main__":
  main(sys.argv)
