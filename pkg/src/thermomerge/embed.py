"""Sampled function space on [0,1], lexicon embeddings, pointwise tree
embedding, high-temperature bounds, and the empirical separation audits."""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .semiring import ThermoParams
from .syntree import Leaf, Lexicon, LexItem, SynTree, enumerate_trees, is_leaf, leaves, merge
from .treeval import argmin_lambda, bracket_eval


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class SampleGrid:
    """Uniform sample positions on a closed interval (default [0,1])."""

    n_samples: int = 256
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.n_samples < 2:
            raise EmbeddingError("need at least 2 samples")
        if not self.hi > self.lo:
            raise EmbeddingError("empty domain")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_samples)


@dataclass(frozen=True)
class FuncVec:
    """A real function sampled on a grid."""

    grid: SampleGrid
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.shape != (self.grid.n_samples,):
            raise EmbeddingError(
                f"sample count {arr.shape} does not match grid ({self.grid.n_samples},)"
            )
        object.__setattr__(self, "samples", arr)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def sup_distance(self, other: "FuncVec") -> float:
        return float(np.max(np.abs(self.samples - other.samples)))


@dataclass
class LexEmbedding:
    """One sampled function per lexical item, sharing a grid; the sample
    matrix must have full row rank so items stay distinguishable."""

    grid: SampleGrid
    vectors: dict
    seed: Optional[int] = None

    def __getitem__(self, item_id: str) -> np.ndarray:
        try:
            return self.vectors[item_id]
        except KeyError:
            raise EmbeddingError(f"item {item_id!r} not embedded") from None

    def items(self) -> list:
        return list(self.vectors)

    def matrix(self) -> np.ndarray:
        return np.vstack([self.vectors[k] for k in self.vectors])

    def func(self, item_id: str) -> FuncVec:
        return FuncVec(self.grid, self[item_id])


def rank_deficient_items(matrix: np.ndarray, ids: Sequence[str], tol: float = 1e-8) -> list:
    """Ids whose rows are (numerically) linearly dependent on earlier rows."""
    bad, kept = [], []
    for i, row in enumerate(matrix):
        trial = np.vstack(kept + [row]) if kept else row[None, :]
        if np.linalg.matrix_rank(trial, tol=tol * max(1.0, float(np.abs(trial).max()))) < len(trial):
            bad.append(ids[i])
        else:
            kept.append(row)
    return bad


def _check_rank(vectors: dict, tol: float = 1e-8) -> None:
    ids = list(vectors)
    mat = np.vstack([vectors[k] for k in ids])
    bad = rank_deficient_items(mat, ids, tol)
    if bad:
        raise EmbeddingError(f"embedding is rank deficient; dependent items: {bad}")


def generate_embedding(
    lexicon: Lexicon,
    grid: SampleGrid,
    modes: int = 5,
    amplitude: float = 1.0,
    seed: int = 0,
) -> LexEmbedding:
    """Random truncated Fourier series per item, rescaled to the requested
    sup-norm.  Deterministic under the seed; rank checked on construction."""
    rng = np.random.default_rng(seed)
    t = grid.points
    vectors = {}
    for item in lexicon:
        coeffs = rng.standard_normal(2 * modes + 1)
        f = coeffs[0] * np.ones_like(t) / 2.0
        for k in range(1, modes + 1):
            f = f + coeffs[2 * k - 1] * np.cos(2 * np.pi * k * t)
            f = f + coeffs[2 * k] * np.sin(2 * np.pi * k * t)
        peak = np.max(np.abs(f))
        if peak == 0.0:
            raise EmbeddingError(f"degenerate draw for item {item.id!r}")
        vectors[item.id] = f * (amplitude / peak)
    _check_rank(vectors)
    return LexEmbedding(grid, vectors, seed=seed)


def embedding_from_rows(grid: SampleGrid, rows: dict) -> LexEmbedding:
    vectors = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    for k, v in vectors.items():
        if v.shape != (grid.n_samples,):
            raise EmbeddingError(f"row {k!r} has {v.shape[0]} samples, grid has {grid.n_samples}")
    _check_rank(vectors)
    return LexEmbedding(grid, vectors)


def save_embedding_csv(e: LexEmbedding, path) -> None:
    ids = e.items()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + ids)
        for i, t in enumerate(e.grid.points):
            w.writerow([repr(float(t))] + [repr(float(e.vectors[k][i])) for k in ids])


def load_embedding_csv(path) -> LexEmbedding:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    if not header or header[0] != "t":
        raise EmbeddingError("embedding CSV must start with a 't' column")
    ids = header[1:]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    ts = data[:, 0]
    grid = SampleGrid(len(ts), float(ts[0]), float(ts[-1]))
    return embedding_from_rows(grid, {k: data[:, j + 1] for j, k in enumerate(ids)})


def high_temp_beta(e: LexEmbedding, subset: Optional[Sequence[str]] = None) -> tuple:
    """(M, beta_bound): the sup-norm bound over the items and its reciprocal.

    For any beta < beta_bound, every pairwise |beta/2 * (f - g)| stays
    below 1 on the grid, so deformed sums of embedded values have interior
    minimizers.
    """
    ids = list(subset) if subset is not None else e.items()
    if not ids:
        raise EmbeddingError("empty item subset")
    m = max(float(np.max(np.abs(e[i]))) for i in ids)
    if m == 0.0:
        raise EmbeddingError("degenerate all-zero embedding has no temperature bound")
    return m, 1.0 / m


def embed_tree(t: SynTree, params: ThermoParams, e: LexEmbedding) -> FuncVec:
    """Pointwise bracket evaluation of the tree over the embedded leaves."""
    xs = {item.id: e[item.id] for item in set(leaves(t))}
    return FuncVec(e.grid, np.asarray(bracket_eval(t, params, xs), dtype=float))


def embed_tree_with_lambdas(t: SynTree, params: ThermoParams, e: LexEmbedding):
    """As embed_tree, also returning the pointwise optimal weight per node."""
    xs = {item.id: e[item.id] for item in set(leaves(t))}
    if is_leaf(t):
        return FuncVec(e.grid, np.asarray(xs[t.item.id], dtype=float)), {}
    lam = argmin_lambda(t, params, xs)
    for addr in lam:
        lam[addr] = np.array(np.broadcast_to(np.asarray(lam[addr], dtype=float), (e.grid.n_samples,)))
    vec = np.asarray(bracket_eval(t, params, xs), dtype=float)
    return FuncVec(e.grid, vec), lam


# -- audits -------------------------------------------------------------------


@dataclass
class SizeAudit:
    n_leaves: int
    label_sets: int
    shapes: int
    pairs: int
    min_gap: float
    failing_pairs: list = field(default_factory=list)


@dataclass
class AuditReport:
    threshold: float
    beta: float
    measure: str
    per_size: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def min_gap(self) -> float:
        gaps = [s.min_gap for s in self.per_size if s.pairs > 0]
        return min(gaps) if gaps else float("inf")

    @property
    def passed(self) -> bool:
        return all(not s.failing_pairs for s in self.per_size)

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "beta": self.beta,
            "measure": self.measure,
            "passed": self.passed,
            "min_gap": self.min_gap,
            "warnings": self.warnings,
            "per_size": [
                {
                    "n_leaves": s.n_leaves,
                    "label_sets": s.label_sets,
                    "shapes": s.shapes,
                    "pairs": s.pairs,
                    "min_gap": s.min_gap,
                    "failing_pairs": s.failing_pairs,
                }
                for s in self.per_size
            ],
        }


def injectivity_audit(
    e: LexEmbedding,
    params: ThermoParams,
    n_max: int = 4,
    threshold: float = 1e-9,
    labels: Optional[Sequence[str]] = None,
    threads: int = 1,
) -> AuditReport:
    """Embed every tree shape over every choice of distinct labels up to
    n_max leaves and report minimum pairwise sup-norm gaps.

    Separation is generic, not guaranteed: failures are reported, not raised.
    Label subsets are independent, so they can be scanned by a thread pool;
    results are aggregated in submission order, keeping reports deterministic.
    """
    if n_max > 6:
        raise EmbeddingError("n_max capped at 6 (shape count explodes)")
    ids = list(labels) if labels is not None else e.items()
    _, beta_bound = high_temp_beta(e, ids)
    report = AuditReport(threshold=threshold, beta=params.beta, measure=str(params.measure))
    if params.beta >= beta_bound:
        report.warnings.append(
            f"beta={params.beta:g} is outside the high-temperature range (< {beta_bound:g})"
        )

    def scan(combo):
        trees = enumerate_trees([LexItem(i) for i in combo])
        vecs = [embed_tree(t, params, e) for t in trees]
        gaps = [
            (trees[i].key, trees[j].key, vecs[i].sup_distance(vecs[j]))
            for i, j in itertools.combinations(range(len(trees)), 2)
        ]
        return len(trees), gaps

    for n in range(2, n_max + 1):
        combos = list(itertools.combinations(ids, n))
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                scanned = list(pool.map(scan, combos))
        else:
            scanned = [scan(c) for c in combos]
        worst = float("inf")
        failing = []
        shapes = pairs = 0
        for shape_count, gaps in scanned:
            shapes = shape_count
            for key_i, key_j, gap in gaps:
                pairs += 1
                worst = min(worst, gap)
                if gap <= threshold:
                    failing.append([key_i, key_j, gap])
        report.per_size.append(
            SizeAudit(n, len(combos), shapes, pairs, worst if pairs else float("inf"), failing)
        )
    return report


@dataclass
class WallCrossingReport:
    left_shape: str
    right_shape: str
    sup_gap: float
    defect_fraction: float
    threshold: float

    def to_json(self) -> dict:
        return self.__dict__.copy()


def wall_crossing_check(
    e: LexEmbedding,
    params: ThermoParams,
    item_ids: Optional[Sequence[str]] = None,
    threshold: float = 1e-6,
) -> WallCrossingReport:
    """Compare the two bracketings that differ by a single rotation at one
    vertex, grafted into an otherwise identical five-leaf tree.

    Reports the sup-norm gap and the fraction of grid points where the
    pointwise associativity defect exceeds the threshold.
    """
    ids = list(item_ids) if item_ids is not None else e.items()[:5]
    if len(ids) < 3:
        raise EmbeddingError("need at least 3 items")
    a, b, c = (Leaf(LexItem(i)) for i in ids[:3])
    t_left = merge(merge(a, b), c)
    t_right = merge(a, merge(b, c))
    for extra in ids[3:]:  # graft the rotated pair into a common larger context
        t_left = merge(t_left, Leaf(LexItem(extra)))
        t_right = merge(t_right, Leaf(LexItem(extra)))
    left = embed_tree(t_left, params, e)
    right = embed_tree(t_right, params, e)
    defect = np.abs(left.samples - right.samples)
    return WallCrossingReport(
        left_shape=t_left.key,
        right_shape=t_right.key,
        sup_gap=float(np.max(defect)),
        defect_fraction=float(np.mean(defect > threshold)),
        threshold=threshold,
    )


def report_to_json_str(report) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
