#!/usr/bin/env python3
# Copyright 2026 The mpsee Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts a CSV of 28x28 digit images into MNIST-style IDX files.

Each CSV row holds 784 pixel values in 0..255 plus one integer label (last
column by default).  The first --test-per-class rows of every class go to
t10k-*, the rest to train-*.
"""

import argparse
import collections
import gzip
import pathlib
import struct


def read_rows(path, label_column):
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                values = [int(round(float(v))) for v in fields]
            except ValueError:
                if line_no == 1:
                    continue  # header
                raise
            if label_column == "last":
                label, pixels = values[-1], values[:-1]
            else:
                label, pixels = values[0], values[1:]
            if len(pixels) != 784:
                raise SystemExit(f"{path}:{line_no}: expected 784 pixels, got {len(pixels)}")
            if not all(0 <= p <= 255 for p in pixels) or not 0 <= label <= 255:
                raise SystemExit(f"{path}:{line_no}: value out of byte range")
            yield label, pixels


def write_idx(stem, rows):
    images = bytearray(struct.pack(">IIII", 0x803, len(rows), 28, 28))
    labels = bytearray(struct.pack(">II", 0x801, len(rows)))
    for label, pixels in rows:
        images.extend(pixels)
        labels.append(label)
    pathlib.Path(f"{stem}-images-idx3-ubyte").write_bytes(images)
    pathlib.Path(f"{stem}-labels-idx1-ubyte").write_bytes(labels)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", type=pathlib.Path)
    parser.add_argument("out", type=pathlib.Path)
    parser.add_argument("--label-column", choices=["first", "last"], default="last")
    parser.add_argument("--test-per-class", type=int, default=50)
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    seen = collections.Counter()
    train, test = [], []
    for label, pixels in read_rows(args.csv, args.label_column):
        (test if seen[label] < args.test_per_class else train).append((label, pixels))
        seen[label] += 1
    write_idx(args.out / "train", train)
    write_idx(args.out / "t10k", test)
    print(f"train {len(train)}  test {len(test)}  classes {sorted(seen)}")


if __name__ == "__main__":
    main()
