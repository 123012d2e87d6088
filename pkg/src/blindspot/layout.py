"""2D concept layout: neighbor graph construction plus stochastic
cross-entropy optimization, and the count-driven visual encoding.

The pipeline mirrors UMAP: an exact k-nearest-neighbor graph under cosine
distance with locally calibrated edge weights, symmetrized by fuzzy union,
then per-edge SGD against the fitted low-dimensional curve 1/(1 + a·d^(2b))
with negative sampling. Unlike the reference implementation everything is
single-threaded and driven by one seeded generator, so a (vectors, params,
seed) triple always reproduces the same coordinates bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numba
import numpy as np
from scipy.optimize import curve_fit

__all__ = [
    "LayoutError",
    "LayoutNumericalError",
    "LayoutParams",
    "NeighborGraph",
    "Layout",
    "Encoding",
    "knn_graph",
    "fit_layout",
    "place_new_point",
    "visual_encoding",
    "FONT_SCALE_MIN",
    "FONT_SCALE_MAX",
]

FONT_SCALE_MIN = 10.0
FONT_SCALE_MAX = 32.0

OPACITY_MIN = 0.4
OPACITY_MAX = 1.0

_SMOOTH_TOLERANCE = 1e-5
_SIGMA_ITERATIONS = 64


class LayoutError(ValueError):
    pass


class LayoutNumericalError(LayoutError):
    pass


@dataclass(frozen=True)
class LayoutParams:
    k: int = 15
    min_dist: float = 0.1
    epochs: int = 200
    neg_samples: int = 5
    learning_rate: float = 1.0


@dataclass(frozen=True)
class NeighborGraph:
    """Directed kNN edges with calibrated weights, plus their fuzzy-union
    symmetrization. Node order follows the input mapping."""

    ids: tuple[str, ...]
    knn_indices: np.ndarray  # (n, k_eff) int
    knn_dists: np.ndarray  # (n, k_eff) float
    directed_weights: np.ndarray  # (n, k_eff) float in (0, 1]
    edges: np.ndarray  # (m, 2) int, undirected, i < j
    weights: np.ndarray  # (m,) float in (0, 1]

    @property
    def n_nodes(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class Layout:
    corpus_version: int
    seed: int
    params: LayoutParams
    points: dict[str, tuple[float, float]]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Encoding:
    font_scale: float
    opacity: float


@lru_cache(maxsize=32)
def _fit_curve(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Fit (a, b) of 1/(1 + a·d^(2b)) to the offset exponential with the
    given plateau width."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0, spread * 3, 300)
    yv = np.zeros(xv.shape)
    yv[xv < min_dist] = 1.0
    yv[xv >= min_dist] = np.exp(-(xv[xv >= min_dist] - min_dist) / spread)
    params, _ = curve_fit(curve, xv, yv)
    return float(params[0]), float(params[1])


def knn_graph(vectors: Mapping[str, np.ndarray], k: int = 15) -> NeighborGraph:
    """Exact k-nearest-neighbor graph under cosine distance.

    Directed weight exp(-max(0, d - rho_i)/sigma_i) with rho_i the nearest
    distance and sigma_i binary-searched so each node's outgoing weights sum
    to log2 of its neighbor count; symmetrized as w_ij + w_ji - w_ij*w_ji.
    """
    ids = tuple(vectors.keys())
    n = len(ids)
    if n < 2:
        raise LayoutError("layout needs at least 2 concepts")
    X = np.stack([np.asarray(vectors[i], dtype=np.float64) for i in ids])
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0.0):
        raise LayoutError("zero vector has no cosine neighborhood")
    Xn = X / norms[:, None]
    D = 1.0 - Xn @ Xn.T
    np.clip(D, 0.0, 2.0, out=D)
    np.fill_diagonal(D, np.inf)

    k_eff = min(k, n - 1)
    order = np.argsort(D, axis=1, kind="stable")[:, :k_eff]
    dists = np.take_along_axis(D, order, axis=1)

    target = math.log2(k_eff) if k_eff > 1 else 0.0
    directed = np.empty_like(dists)
    for i in range(n):
        rho = dists[i, 0]
        gaps = np.maximum(dists[i] - rho, 0.0)
        lo, hi, mid = 0.0, np.inf, 1.0
        for _ in range(_SIGMA_ITERATIONS):
            psum = float(np.exp(-gaps / mid).sum())
            if abs(psum - target) < _SMOOTH_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == np.inf else (lo + hi) / 2.0
        sigma = max(mid, 1e-12)
        directed[i] = np.exp(-gaps / sigma)
    # Keep weights strictly positive even if the exponent underflowed.
    np.clip(directed, 1e-12, 1.0, out=directed)

    w_dir: dict[tuple[int, int], float] = {}
    for i in range(n):
        for jidx in range(k_eff):
            w_dir[(i, int(order[i, jidx]))] = float(directed[i, jidx])
    symmetric: dict[tuple[int, int], float] = {}
    for (i, j), wij in w_dir.items():
        key = (i, j) if i < j else (j, i)
        if key in symmetric:
            continue
        a, b = key
        wab = w_dir.get((a, b), 0.0)
        wba = w_dir.get((b, a), 0.0)
        symmetric[key] = wab + wba - wab * wba

    pairs = sorted(symmetric)
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    weights = np.array([symmetric[p] for p in pairs], dtype=np.float64)
    return NeighborGraph(
        ids=ids,
        knn_indices=order,
        knn_dists=dists,
        directed_weights=directed,
        edges=edges,
        weights=weights,
    )


@numba.njit(inline="always")
def _next_u64(state: np.uint64) -> tuple[np.uint64, np.uint64]:
    # splitmix64; cheap, seedable, and identical on every run.
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return state, z ^ (z >> np.uint64(31))


@numba.njit
def _optimize(Y, heads, tails, weights, epochs, learning_rate, neg_samples, a, b, min_d2, seed):
    """Per-edge SGD on the fuzzy cross-entropy objective.

    Each epoch visits every directed edge once in a freshly shuffled order.
    Attraction (scaled by edge weight, both endpoints move) is suppressed
    below the min_dist floor; each visit also applies ``neg_samples``
    repulsive updates against uniformly drawn non-adjacent nodes. Returns -1
    on success or the epoch index at which coordinates went non-finite.
    """
    n = Y.shape[0]
    m = heads.shape[0]
    n_dir = 2 * m
    state = np.uint64(seed) ^ np.uint64(0xDA3E39CB94B95BDB)
    order = np.arange(n_dir)
    for epoch in range(epochs):
        alpha = learning_rate * (1.0 - epoch / epochs)
        for t in range(n_dir - 1, 0, -1):
            state, z = _next_u64(state)
            u = int(z % np.uint64(t + 1))
            order[t], order[u] = order[u], order[t]
        for oi in range(n_dir):
            idx = order[oi]
            ei = idx // 2
            if idx % 2 == 0:
                i, j = heads[ei], tails[ei]
            else:
                i, j = tails[ei], heads[ei]
            w = weights[ei]

            dx = Y[i, 0] - Y[j, 0]
            dy = Y[i, 1] - Y[j, 1]
            d2 = dx * dx + dy * dy
            if d2 > min_d2:
                grad = -2.0 * a * b * d2 ** (b - 1.0) / (1.0 + a * d2**b)
                gx = min(max(grad * dx, -4.0), 4.0)
                gy = min(max(grad * dy, -4.0), 4.0)
                Y[i, 0] += alpha * w * gx
                Y[i, 1] += alpha * w * gy
                Y[j, 0] -= alpha * w * gx
                Y[j, 1] -= alpha * w * gy

            for _ in range(neg_samples):
                state, z = _next_u64(state)
                other = int(z % np.uint64(n))
                if other == i or other == j:
                    continue
                dx = Y[i, 0] - Y[other, 0]
                dy = Y[i, 1] - Y[other, 1]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    rep = 2.0 * b / ((0.001 + d2) * (1.0 + a * d2**b))
                    gx = min(max(rep * dx, -4.0), 4.0)
                    gy = min(max(rep * dy, -4.0), 4.0)
                    Y[i, 0] += alpha * gx
                    Y[i, 1] += alpha * gy

        for node in range(n):
            if not (np.isfinite(Y[node, 0]) and np.isfinite(Y[node, 1])):
                return epoch
    return -1


def fit_layout(
    graph: NeighborGraph,
    params: Optional[LayoutParams] = None,
    seed: int = 0,
    corpus_version: int = 0,
) -> Layout:
    """Optimize 2D coordinates for a neighbor graph.

    Deterministic: initialization, edge visit order, and negative draws are
    all pure functions of the seed. The result is centered at the origin.
    """
    if params is None:
        params = LayoutParams()
    a, b = _fit_curve(params.min_dist)
    rng = np.random.default_rng(seed)
    Y = rng.uniform(-10.0, 10.0, size=(graph.n_nodes, 2))
    failed_epoch = _optimize(
        Y,
        np.ascontiguousarray(graph.edges[:, 0]),
        np.ascontiguousarray(graph.edges[:, 1]),
        graph.weights,
        params.epochs,
        params.learning_rate,
        params.neg_samples,
        a,
        b,
        params.min_dist * params.min_dist,
        seed,
    )
    if failed_epoch >= 0:
        raise LayoutNumericalError(f"numerical failure at epoch {failed_epoch}")
    Y -= Y.mean(axis=0)
    points = {cid: (float(Y[i, 0]), float(Y[i, 1])) for i, cid in enumerate(graph.ids)}
    return Layout(corpus_version=corpus_version, seed=seed, params=params, points=points)


def place_new_point(
    layout: Layout,
    vectors: Mapping[str, np.ndarray],
    new_vector: np.ndarray,
    snap_threshold: float = 0.999,
    k: int = 5,
) -> tuple[float, float]:
    """Out-of-sample placement for an added keyword.

    Snaps onto a near-identical concept, otherwise returns the
    similarity-weighted mean position of the most similar concepts.
    """
    if not layout.points:
        raise LayoutError("layout is empty")
    new_vector = np.asarray(new_vector, dtype=np.float64)
    norm = float(np.linalg.norm(new_vector))
    if norm == 0.0:
        raise LayoutError("zero vector has no placement")

    sims: list[tuple[float, str]] = []
    for cid, (x, y) in layout.points.items():
        vec = vectors.get(cid)
        if vec is None:
            continue
        vec = np.asarray(vec, dtype=np.float64)
        vnorm = float(np.linalg.norm(vec))
        if vnorm == 0.0:
            continue
        sims.append((float(new_vector @ vec) / (norm * vnorm), cid))
    if not sims:
        raise LayoutError("no embeddable concepts to place against")

    sims.sort(key=lambda pair: -pair[0])
    best_sim, best_id = sims[0]
    if best_sim >= snap_threshold:
        return layout.points[best_id]

    top = sims[: min(k, len(sims))]
    weights = np.array([max(s, 0.0) + 1e-6 for s, _ in top])
    weights /= weights.sum()
    coords = np.array([layout.points[cid] for _, cid in top])
    placed = weights @ coords
    return (float(placed[0]), float(placed[1]))


def visual_encoding(
    counts: Mapping[str, int],
    font_min: float = FONT_SCALE_MIN,
    font_max: float = FONT_SCALE_MAX,
) -> dict[str, Encoding]:
    """Count-driven text encoding: square-root font ramp and log opacity
    ramp between the corpus min and max counts."""
    if not counts:
        return {}
    values = list(counts.values())
    c_min, c_max = min(values), max(values)
    encodings: dict[str, Encoding] = {}
    if c_min == c_max:
        for cid in counts:
            encodings[cid] = Encoding(font_scale=font_max, opacity=OPACITY_MAX)
        return encodings
    log_span = math.log1p(c_max) - math.log1p(c_min)
    for cid, count in counts.items():
        # Boundary counts take the bounds exactly; the ramps are only for
        # interior values, so float drift never leaks into the endpoints.
        if count == c_min:
            encodings[cid] = Encoding(font_scale=font_min, opacity=OPACITY_MIN)
            continue
        if count == c_max:
            encodings[cid] = Encoding(font_scale=font_max, opacity=OPACITY_MAX)
            continue
        ratio = (count - c_min) / (c_max - c_min)
        font = font_min + (font_max - font_min) * math.sqrt(ratio)
        opacity = OPACITY_MIN + (OPACITY_MAX - OPACITY_MIN) * (math.log1p(count) - math.log1p(c_min)) / log_span
        encodings[cid] = Encoding(font_scale=font, opacity=opacity)
    return encodings
