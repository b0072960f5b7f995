#!/usr/bin/env python3
# Copyright 2026 The slicedp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the small mixed-type demo table (customers.csv, heldout.csv)."""

import csv
import pathlib
import random

REGIONS = ["north", "south", "east", "west"]
PLANS = ["basic", "plus", "premium"]
# plan preference by region
PLAN_WEIGHTS = {
    "north": [0.6, 0.3, 0.1],
    "south": [0.2, 0.5, 0.3],
    "east": [0.1, 0.3, 0.6],
    "west": [0.4, 0.4, 0.2],
}
BASE_SPEND = {"basic": 30.0, "plus": 70.0, "premium": 130.0}


def row(rng):
  region = rng.choice(REGIONS)
  plan = rng.choices(PLANS, PLAN_WEIGHTS[region])[0]
  age = min(90.0, max(18.0, rng.gauss(45.0, 14.0)))
  spend = BASE_SPEND[plan] + 0.4 * (age - 45.0) + rng.gauss(0.0, 12.0)
  spend = min(200.0, max(0.0, spend))
  score = -1.2 + 0.9 * (plan == "basic") - 0.03 * (age - 45.0)
  churned = "yes" if rng.random() < 1.0 / (1.0 + 2.718281828 ** -score) else "no"
  return [region, plan, churned, f"{age:.1f}", f"{spend:.2f}"]


def write(path, rows):
  with open(path, "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["region", "plan", "churned", "age", "monthly_spend"])
    w.writerows(rows)


def main():
  here = pathlib.Path(__file__).resolve().parent
  rng = random.Random(20260417)
  write(here / "customers.csv", [row(rng) for _ in range(500)])
  write(here / "heldout.csv", [row(rng) for _ in range(500)])


if __name__ == "__main__":
  main()
