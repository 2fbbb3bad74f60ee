"""Episode-based evaluation: M-class K-shot sampling, accuracy, sweeps.

Randomness comes from numpy's PCG64 generator seeded through
``SeedSequence``. Episode ``j`` of a run with root seed ``s`` uses the child
sequence ``SeedSequence(s, spawn_key=(j,))``, so a run is reproducible on
any platform and independent of worker scheduling.
"""
from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset
from .datasets import gaussians
from .lfd import as_radii
from .models import DrKNN

DEFAULT_RADIUS_GRID = tuple(round(0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class EpisodeSpec:
    class_count: int = 2
    shots: int = 5
    query_count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.class_count < 2 or self.shots < 1 or self.query_count < 1:
            raise ValueError("need class_count >= 2, shots >= 1 and query_count >= 1")


@dataclass(frozen=True)
class Episode:
    train: Dataset
    queries: Dataset
    train_index: np.ndarray
    query_index: np.ndarray
    classes: np.ndarray      # source labels, in relabeled order 1..M


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def episode_seed(root: int, ordinal: int) -> int:
    return int(np.random.SeedSequence(root, spawn_key=(ordinal,))
               .generate_state(1, np.uint64)[0])


def sample_episode(source: Dataset, spec: EpisodeSpec) -> Episode:
    """Draw ``M`` classes, ``K`` training samples each, and disjoint queries.

    Selected classes are relabeled ``1..M`` in increasing order of their
    source label. Queries are drawn uniformly without replacement from the
    remaining samples of the selected classes.
    """
    rng = _rng(spec.seed)
    counts = source.class_counts()
    present = np.flatnonzero(counts > 0) + 1
    M, K = spec.class_count, spec.shots
    if len(present) < M:
        raise ValueError(f"source has {len(present)} classes, episode needs {M}")
    classes = np.sort(rng.choice(present, size=M, replace=False))
    train_idx, pool = [], []
    for c in classes:
        members = np.flatnonzero(source.labels == c)
        if len(members) < K + 1:
            raise ValueError(
                f"class {c} has {len(members)} samples, need at least {K + 1}")
        picked = rng.permutation(members)
        train_idx.append(picked[:K])
        pool.append(picked[K:])
    train_idx = np.concatenate(train_idx)
    pool = np.sort(np.concatenate(pool))
    if len(pool) < spec.query_count:
        raise ValueError(
            f"only {len(pool)} query candidates, {spec.query_count} requested")
    query_idx = rng.choice(pool, size=spec.query_count, replace=False)

    relabel = np.zeros(source.class_count + 1, dtype=int)
    relabel[classes] = np.arange(1, M + 1)
    train = Dataset(source.features[train_idx], relabel[source.labels[train_idx]], M)
    queries = Dataset(source.features[query_idx], relabel[source.labels[query_idx]], M)
    return Episode(train, queries, train_idx, query_idx, classes)


def accuracy(model, train: Dataset, queries: Dataset) -> float:
    model.fit(train)
    return float(np.mean(model.predict(queries.features) == queries.labels))


def evaluate(model, episode: Episode) -> float:
    """Fraction of the episode's queries the fitted model labels correctly."""
    return accuracy(model, episode.train, episode.queries)


def stratified_folds(labels, folds: int, seed: int = 0) -> np.ndarray:
    """Fold id per sample; each class is shuffled then dealt round-robin."""
    labels = np.asarray(labels)
    rng = _rng(seed)
    out = np.empty(len(labels), dtype=int)
    start = 0
    for c in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == c))
        out[members] = (start + np.arange(len(members))) % folds
        start += len(members)
    return out


def cross_validate_radius(train: Dataset, grid, folds: int = 5, model=None,
                          seed: int = 0) -> np.ndarray:
    """Grid radius with the best pooled held-out accuracy.

    ``grid`` holds scalars (one radius for every class) or per-class
    vectors. ``model`` is a :class:`~drknn.models.DrKNN` prototype whose
    ``radius`` is overridden for each candidate; by default Dr.5-NN. Ties go
    to the lexicographically smallest radius vector.
    """
    M = train.class_count
    cands = sorted((tuple(as_radii(g, M)) for g in grid))
    if not cands:
        raise ValueError("radius grid is empty")
    if folds < 2 or folds > len(train):
        raise ValueError(f"folds = {folds} outside 2..{len(train)}")
    fold_of = stratified_folds(train.labels, folds, seed)
    for f in range(folds):
        missing = np.setdiff1d(np.arange(1, M + 1), train.labels[fold_of != f])
        if missing.size:
            raise ValueError(
                f"fold {f} leaves class {missing[0]} out of its training part")
    proto = model if model is not None else DrKNN(k=5)

    best, best_acc = None, -1.0
    for r in cands:
        hits = 0
        for f in range(folds):
            held = fold_of == f
            fitted = dataclasses.replace(proto, radius=list(r), radius_grid=None)
            fitted.fit(train.subset(np.flatnonzero(~held)))
            hits += int(np.sum(fitted.predict(train.features[held]) == train.labels[held]))
        acc = hits / len(train)
        if acc > best_acc + 1e-12:
            best, best_acc = r, acc
    return np.array(best)


@dataclass
class EvalReport:
    classifier: str
    params: dict
    accuracies: list
    seeds: list
    seconds: list
    extras: dict = field(default_factory=dict)

    @property
    def episodes(self) -> int:
        return len(self.accuracies)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies, ddof=1)) if self.episodes > 1 else 0.0

    def as_dict(self) -> dict:
        return {"classifier": self.classifier, "params": self.params,
                "episodes": self.episodes, "mean_accuracy": self.mean,
                "std_accuracy": self.std, "accuracies": list(self.accuracies),
                "seeds": [str(s) for s in self.seeds],
                "seconds": list(self.seconds), "extras": self.extras}


def _one_episode(model, source: Dataset, spec: EpisodeSpec, ordinal: int):
    seed = episode_seed(spec.seed, ordinal)
    ep = sample_episode(source, dataclasses.replace(spec, seed=seed))
    t0 = time.perf_counter()
    acc = evaluate(model, ep)
    extra = {}
    if hasattr(model, "truncated_"):
        extra["kept_fraction"] = model.kept_fraction
    if hasattr(model, "radius_"):
        extra["radius"] = [float(v) for v in model.radius_]
    return acc, time.perf_counter() - t0, seed, extra


def run_episodes(model, source: Dataset, spec: EpisodeSpec, episodes: int,
                 jobs: int = 1) -> EvalReport:
    """Evaluate ``model`` on ``episodes`` independent episodes.

    Episode seeds derive from ``spec.seed``, so two runs with the same spec
    see identical episodes (paired comparison). Results are ordered by
    episode ordinal whatever the worker count.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    args = [(dataclasses.replace(model), source, spec, j) for j in range(episodes)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_episode, *zip(*args)))
    else:
        results = [_one_episode(*a) for a in args]
    extras: dict = {}
    for _, _, _, ex in results:
        for k, v in ex.items():
            extras.setdefault(k, []).append(v)
    return EvalReport(classifier=model.name, params=model.params(),
                      accuracies=[r[0] for r in results],
                      seeds=[r[2] for r in results],
                      seconds=[r[1] for r in results], extras=extras)


SWEEP_PARAMETERS = ("k", "bandwidth", "radius", "tau")


def sweep(parameter: str, values, model, source: Dataset, spec: EpisodeSpec,
          episodes: int, jobs: int = 1) -> list[EvalReport]:
    """One report per value of ``parameter``, all on the same episodes."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"cannot sweep {parameter!r}; choose from {SWEEP_PARAMETERS}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if not hasattr(model, parameter):
        raise ValueError(f"{model.name} has no parameter {parameter!r}")
    reports = []
    for v in values:
        change = {parameter: v}
        if parameter == "radius":
            change["radius_grid"] = None
        rep = run_episodes(dataclasses.replace(model, **change), source, spec,
                           episodes, jobs)
        rep.extras["swept"] = {"parameter": parameter, "value": v}
        reports.append(rep)
    return reports


def benchmark_source(seed: int = 0) -> Dataset:
    """Pool for the synthetic benchmark: two unit Gaussians 2 apart, 20% label noise."""
    return gaussians(n_per_class=200, classes=2, dim=2, separation=2.0,
                     label_noise=0.2, seed=seed)


def summary_rows(reports) -> list[dict]:
    """Flat rows for tabular output, one per report."""
    rows = []
    for rep in reports:
        sw = rep.extras.get("swept", {})
        row = {"classifier": rep.classifier, "parameter": sw.get("parameter", ""),
               "value": sw.get("value", ""), "episodes": rep.episodes,
               "mean_accuracy": rep.mean, "std_accuracy": rep.std,
               "min_accuracy": min(rep.accuracies), "max_accuracy": max(rep.accuracies)}
        if "kept_fraction" in rep.extras:
            row["mean_kept_fraction"] = float(np.mean(rep.extras["kept_fraction"]))
        rows.append(row)
    return rows
