"""Delimited-text dataset files and the bundled toy data.

File format: one sample per row, real feature columns followed by a final
integer label column (1-based). Comma, tab, semicolon or whitespace
delimited. A first row that does not parse as numbers is taken as a header.
"""
from __future__ import annotations

import csv
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Dataset

BUILTINS = ("two_point", "six_point", "gaussians")


class DatasetFormatError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _split(line: str) -> list[str]:
    for delim in (",", "\t", ";"):
        if delim in line:
            return [f.strip() for f in line.split(delim)]
    return line.split()


def _is_numeric(fields) -> bool:
    try:
        [float(f) for f in fields]
    except ValueError:
        return False
    return True


def parse_dataset(text: str, class_count: int = 0) -> Dataset:
    rows, labels = [], []
    width = None
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = _split(line)
        if first:
            first = False
            if not _is_numeric(fields):
                continue  # header
        if len(fields) < 2:
            raise DatasetFormatError(lineno, "need at least one feature and a label")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise DatasetFormatError(
                lineno, f"expected {width} columns, found {len(fields)}")
        feats = []
        for col, f in enumerate(fields[:-1], start=1):
            try:
                v = float(f)
            except ValueError:
                raise DatasetFormatError(lineno, f"column {col}: {f!r} is not a number") from None
            if not math.isfinite(v):
                raise DatasetFormatError(lineno, f"column {col}: non-finite value {f!r}")
            feats.append(v)
        try:
            lab = float(fields[-1])
        except ValueError:
            raise DatasetFormatError(lineno, f"label {fields[-1]!r} is not an integer") from None
        if not lab.is_integer() or lab < 1:
            raise DatasetFormatError(lineno, f"label {fields[-1]!r} is not a positive integer")
        rows.append(feats)
        labels.append(int(lab))
    if not rows:
        raise DatasetFormatError(0, "no samples")
    return Dataset(np.array(rows), np.array(labels), class_count)


def load_dataset(path, class_count: int = 0) -> Dataset:
    """Read a dataset file, or a bundled one named ``builtin:<name>``."""
    path = str(path)
    if path.startswith("builtin:"):
        return builtin(path.split(":", 1)[1])
    return parse_dataset(Path(path).read_text(), class_count)


def save_dataset(dataset: Dataset, path, header: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j + 1}" for j in range(dataset.dim)] + ["label"])
        for x, y in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def two_point() -> Dataset:
    """Two classes, one point each, unit distance apart."""
    return _bundled("two_point.csv")


def six_point() -> Dataset:
    """Two classes of three collinear points; the inner pair is 0.5 apart."""
    return _bundled("six_point.csv")


def gaussians(n_per_class: int = 200, classes: int = 2, dim: int = 2,
              separation: float = 2.0, label_noise: float = 0.2,
              seed: int = 0) -> Dataset:
    """Isotropic unit-variance Gaussian classes with uniform label noise.

    Class means sit on the coordinate axes, ``separation`` apart along
    axis 0 for two classes and on a scaled simplex for more. A fraction
    ``label_noise`` of samples gets a label drawn uniformly from the other
    classes.
    """
    rng = np.random.default_rng(seed)
    means = np.zeros((classes, dim))
    if classes == 2:
        means[1, 0] = separation
    else:
        for m in range(classes):
            means[m, m % dim] += separation / np.sqrt(2)
    X = np.concatenate([rng.normal(means[m], 1.0, size=(n_per_class, dim))
                        for m in range(classes)])
    y = np.repeat(np.arange(1, classes + 1), n_per_class)
    flip = rng.random(len(y)) < label_noise
    shift = rng.integers(1, classes, size=len(y))
    y = np.where(flip, (y - 1 + shift) % classes + 1, y)
    return Dataset(X, y, classes)


def builtin(name: str) -> Dataset:
    if name == "two_point":
        return two_point()
    if name == "six_point":
        return six_point()
    if name == "gaussians":
        return gaussians()
    raise ValueError(f"unknown builtin dataset {name!r}; choose from {BUILTINS}")


def _bundled(fname: str) -> Dataset:
    text = resources.files("drknn").joinpath("data", fname).read_text()
    return parse_dataset(text)
