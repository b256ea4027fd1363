"""Regenerates the Parquet/CSV fixtures used by the I/O tests.

Run from this directory: python3 make_fixtures.py
"""
import math

import numpy as np
import pyarrow as pa
import pyarrow.parquet as pq


def gait_table(n=64, seed=7):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    return {
        "knee_x": np.sin(2 * math.pi * t / 16) + 0.01 * rng.standard_normal(n),
        "knee_y": rng.standard_normal(n) * 1e-3,
        "hip_z": np.cumsum(rng.standard_normal(n)),
    }


def write_csv(path, columns):
    names = list(columns)
    with open(path, "w", newline="") as f:
        f.write(",".join(names) + "\n")
        for i in range(len(columns[names[0]])):
            f.write(",".join(repr(float(columns[c][i])) for c in names) + "\n")


def main():
    cols = gait_table()
    write_csv("gait_small.csv", cols)
    table = pa.table({k: pa.array(v, pa.float64()) for k, v in cols.items()})
    pq.write_table(table, "gait_small_plain.parquet", compression="NONE", use_dictionary=False)
    pq.write_table(table, "gait_small_snappy.parquet", compression="SNAPPY", use_dictionary=True)
    pq.write_table(table, "gait_small_gzip_v2.parquet", compression="GZIP", use_dictionary=False,
                   data_page_version="2.0")

    mixed = pa.table({
        "subject_id": pa.array(["s%02d" % (i % 3) for i in range(12)], pa.string()),
        "ankle": pa.array([None, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5, 10.5, None], pa.float64()),
        "count32": pa.array(list(range(-6, 6)), pa.int32()),
        "count64": pa.array([2 ** 40 + i for i in range(12)], pa.int64()),
        "single": pa.array([0.25 * i for i in range(12)], pa.float32()),
        "flag": pa.array([i % 2 == 0 for i in range(12)], pa.bool_()),
    })
    pq.write_table(mixed, "mixed_types.parquet", compression="SNAPPY", use_dictionary=True)

    # Same first bytes as any Parquet file, but an extension that says nothing.
    pq.write_table(table, "disguised.txt", compression="NONE", use_dictionary=False)


if __name__ == "__main__":
    main()
