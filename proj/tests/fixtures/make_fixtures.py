#!/usr/bin/env python3
"""Generate the tiny IDX/CSV fixtures used by the data-loader tests.

Written independently of the C++ loader so the committed binaries act as an
external oracle for the parser.
"""
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write_idx_images(path: Path, images):
    rows = len(images[0])
    cols = len(images[0][0])
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), rows, cols))
        for img in images:
            for row in img:
                f.write(bytes(row))


def write_idx_labels(path: Path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    images = [
        [[0, 128], [255, 7]],
        [[1, 2], [3, 4]],
    ]
    write_idx_images(HERE / "mini_images.idx", images)
    write_idx_labels(HERE / "mini_labels.idx", [3, 9])

    # Count mismatch: 2 images vs 3 labels.
    write_idx_images(HERE / "mismatch_images.idx", images)
    write_idx_labels(HERE / "mismatch_labels.idx", [0, 1, 2])

    (HERE / "empty.idx").write_bytes(b"")

    (HERE / "mini.csv").write_text(
        "f1,f2,label\n"
        "0.5,1.25,0\n"
        "-2.0,3.5,1\n"
        "4.0,0.0,2\n"
    )
    (HERE / "ragged.csv").write_text("1.0,2.0,0\n1.0,1\n")
    (HERE / "nonnumeric.csv").write_text("1.0,2.0,0\n1.0,oops,1\n")


if __name__ == "__main__":
    main()
