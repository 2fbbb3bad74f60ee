"""Fit/predict wrappers around the decision rules, used by the evaluation harness.

All models are plain dataclasses holding hyperparameters; ``fit`` stores
fitted state in attributes with a trailing underscore and returns self;
``predict`` returns 1-based labels.
"""
from __future__ import annotations

import zlib
from dataclasses import asdict, dataclass

import numpy as np

from . import classifiers as clf
from .core import Dataset, empirical_distributions, euclidean_cost
from .embedding import fit_pca, fit_svd, standardize, transform
from .lfd import as_radii, solve_lfd


def parse_embedding(spec: str | None) -> tuple[str, int] | None:
    """``"pca:3"`` -> ``("pca", 3)``; ``None``/``"none"`` -> ``None``."""
    if spec is None or spec == "none":
        return None
    kind, _, r = spec.partition(":")
    if kind not in ("pca", "svd") or not r.isdigit():
        raise ValueError(f"embedding must be none, pca:<r> or svd:<r>, got {spec!r}")
    return kind, int(r)


@dataclass
class _Base:
    embedding: str | None = None
    standardize: bool = False

    name = "base"

    def _fit_features(self, train: Dataset) -> Dataset:
        self.scale_ = standardize(train) if self.standardize else None
        X = self._scaled(train.features)
        spec = parse_embedding(self.embedding)
        if spec is None:
            self.emb_ = None
        else:
            kind, r = spec
            self.emb_ = (fit_pca if kind == "pca" else fit_svd)(X, r)
            X = transform(self.emb_, X)
        return Dataset(X, train.labels, train.class_count)

    def _scaled(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.scale_ is not None:
            X = (X - self.scale_[0]) / self.scale_[1]
        return X

    def _map(self, X) -> np.ndarray:
        X = self._scaled(X)
        return X if self.emb_ is None else transform(self.emb_, X)

    def params(self) -> dict:
        out = {"classifier": self.name}
        for k, v in asdict(self).items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out


@dataclass
class VanillaKNN(_Base):
    k: int = 5
    name = "knn"

    def fit(self, train: Dataset):
        self.train_ = self._fit_features(train)
        return self

    def predict(self, X) -> np.ndarray:
        k = min(self.k, len(self.train_))
        return clf.classify(clf.vanilla_knn_votes(self._map(X), self.train_, k))


@dataclass
class InverseDistanceKNN(_Base):
    k: int = 5
    name = "inverse_distance"

    def fit(self, train: Dataset):
        self.train_ = self._fit_features(train)
        return self

    def predict(self, X) -> np.ndarray:
        k = min(self.k, len(self.train_))
        return clf.classify(clf.inverse_distance_votes(self._map(X), self.train_, k))


@dataclass
class DrKNN(_Base):
    """Robust weighted k-NN with LFD weights.

    ``radius`` is a scalar or per-class vector. When ``radius_grid`` is
    given the radius is chosen on the training set by stratified
    cross-validation instead, and the choice is stored in ``radius_``.
    """

    k: int = 5
    radius: float | list = 0.0
    radius_grid: list | None = None
    folds: int = 5
    cv_seed: int = 0
    name = "drknn"

    def _lfds(self, train: Dataset):
        self.train_ = self._fit_features(train)
        if self.radius_grid is not None:
            from .evaluation import cross_validate_radius
            proto = DrKNN(k=self.k)
            self.radius_ = cross_validate_radius(
                self.train_, self.radius_grid, folds=self.folds,
                model=proto, seed=self.cv_seed)
        else:
            self.radius_ = as_radii(self.radius, train.class_count)
        cost = euclidean_cost(self.train_)
        self.solution_ = solve_lfd(cost, empirical_distributions(self.train_),
                                   self.radius_)
        self.weights_ = self.solution_.lfds

    def fit(self, train: Dataset):
        self._lfds(train)
        return self

    def votes(self, X) -> np.ndarray:
        k = min(self.k, len(self.train_))
        return clf.drknn_votes(self._map(X), self.train_, self.weights_, k)

    def predict(self, X) -> np.ndarray:
        return clf.classify(self.votes(X))


@dataclass
class KernelSmoother(DrKNN):
    bandwidth: float = 1.0
    name = "kernel"

    def predict(self, X) -> np.ndarray:
        return clf.classify(clf.kernel_log_votes(self._map(X), self.train_,
                                                 self.weights_, self.bandwidth))


@dataclass
class TruncatedDrKNN(DrKNN):
    """Dr.k-NN restricted to high-entropy training points.

    ``k`` is capped at the number of retained points.
    """

    tau: float = 0.9
    name = "truncated"

    def fit(self, train: Dataset):
        self._lfds(train)
        self.truncated_ = clf.truncate(self.weights_, self.tau)
        return self

    @property
    def kept_fraction(self) -> float:
        return len(self.truncated_.kept_indices) / len(self.train_)

    def predict(self, X) -> np.ndarray:
        k = min(self.k, len(self.truncated_.kept_indices))
        return clf.classify(clf.truncated_drknn_votes(
            self._map(X), self.train_, self.weights_, k, self.truncated_))


@dataclass
class RandomGuess(_Base):
    seed: int = 0
    name = "random"

    def fit(self, train: Dataset):
        self.M_ = train.class_count
        # stream keyed on the training set so episodes draw independently
        self.rng_ = np.random.default_rng(
            [self.seed, zlib.crc32(train.features.tobytes()), len(train)])
        return self

    def predict(self, X) -> np.ndarray:
        n = len(np.atleast_2d(X))
        return self.rng_.integers(1, self.M_ + 1, size=n)


MODELS = {m.name: m for m in (VanillaKNN, InverseDistanceKNN, DrKNN,
                              KernelSmoother, TruncatedDrKNN, RandomGuess)}


def make_model(name: str, **params):
    try:
        cls = MODELS[name]
    except KeyError:
        raise ValueError(f"unknown classifier {name!r}; choose from {sorted(MODELS)}") from None
    known = {f for f in cls.__dataclass_fields__}
    return cls(**{k: v for k, v in params.items() if k in known})
