#!/usr/bin/env python3
"""Export the scikit-learn handwritten-digits dataset (UCI optical digits,
8x8 grayscale, 10 classes) to IDX files under data/.

This is the bundled desk-scale dataset for the digit-classification
experiments. Pixel values 0..16 are rescaled to 0..255 so the IDX loader's
1/255 scaling lands in [0, 1]. The split is stratified: the first 80% of each
class (dataset order) goes to train, the rest to test.
"""
import struct
from pathlib import Path

from sklearn.datasets import load_digits

OUT = Path(__file__).resolve().parent.parent / "data"


def write_images(path, rows):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(rows), 8, 8))
        for r in rows:
            f.write(bytes(int(round(v * 255.0 / 16.0)) for v in r))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(int(y) for y in labels))


def main():
    ds = load_digits()
    by_class = {}
    for x, y in zip(ds.data, ds.target):
        by_class.setdefault(int(y), []).append(x)

    train_x, train_y, test_x, test_y = [], [], [], []
    for y in sorted(by_class):
        xs = by_class[y]
        cut = int(len(xs) * 0.8)
        train_x.extend(xs[:cut])
        train_y.extend([y] * cut)
        test_x.extend(xs[cut:])
        test_y.extend([y] * (len(xs) - cut))

    OUT.mkdir(exist_ok=True)
    write_images(OUT / "digits_train_images.idx", train_x)
    write_labels(OUT / "digits_train_labels.idx", train_y)
    write_images(OUT / "digits_test_images.idx", test_x)
    write_labels(OUT / "digits_test_labels.idx", test_y)
    print(f"train={len(train_y)} test={len(test_y)}")


if __name__ == "__main__":
    main()
