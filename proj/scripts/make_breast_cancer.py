#!/usr/bin/env python3
"""Regenerate data/breast_cancer.csv from scikit-learn's copy of the UCI
Wisconsin Diagnostic Breast Cancer table.

Layout: 31 columns, 569 rows. The continuous `mean_radius` column is moved
to the end and serves as the default regression outcome; the binary
diagnosis label is kept as the first feature column, giving 30 feature
columns total.
"""

import numpy as np
from sklearn.datasets import load_breast_cancer


def main() -> None:
    d = load_breast_cancer()
    names = [n.replace(" ", "_") for n in d.feature_names]
    out_idx = names.index("mean_radius")

    feat_names = [n for i, n in enumerate(names) if i != out_idx]
    feat_cols = np.delete(d.data, out_idx, axis=1)
    outcome = d.data[:, out_idx]
    diagnosis = d.target.astype(float)

    header = ["diagnosis"] + feat_names + ["mean_radius"]
    with open("data/breast_cancer.csv", "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in range(d.data.shape[0]):
            row = [repr(float(diagnosis[r]))]
            row += [repr(float(v)) for v in feat_cols[r]]
            row.append(repr(float(outcome[r])))
            f.write(",".join(row) + "\n")
    print(f"wrote data/breast_cancer.csv ({d.data.shape[0]} rows, {len(header)} columns)")


if __name__ == "__main__":
    main()
