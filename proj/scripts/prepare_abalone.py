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
"""Converts the UCI Abalone file abalone.data into data/abalone.csv.

Usage: prepare_abalone.py ABALONE_DATA OUT_CSV

abalone.data has no header; columns are sex, length, diameter, height,
whole weight, shucked weight, viscera weight, shell weight, rings.
Source: https://archive.ics.uci.edu/dataset/1/abalone
"""

import csv
import sys

COLUMNS = [
    "sex", "length", "diameter", "height", "whole_weight", "shucked_weight",
    "viscera_weight", "shell_weight", "rings",
]


def main(argv):
  if len(argv) != 3:
    sys.exit(__doc__)
  n = 0
  with open(argv[1]) as src, open(argv[2], "w", newline="") as out:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for line in src:
      line = line.strip()
      if not line:
        continue
      cells = [c.strip() for c in line.split(",")]
      if len(cells) != len(COLUMNS):
        raise ValueError(f"bad row {line!r}")
      writer.writerow(cells)
      n += 1
  if n != 4177:
    print(f"warning: expected 4177 rows, got {n}", file=sys.stderr)
  print(f"wrote {n} rows to {argv[2]}")


if __name__ == "__main__":
  main(sys.argv)
