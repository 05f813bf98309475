"""Independent oracles and shared dataset builders for the test suite.

Everything here recomputes expected values by a route different from the
package code: exact fractions for filter weights, per-position
polynomial fits instead of convolution, explicit pair enumeration,
contiguous-partition search, and dense-grid density minima.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

import recluster as rc


# --- Savitzky-Golay ---------------------------------------------------------


def normal_equation_weights(w_length: int, poly: int) -> list[Fraction]:
    """Central smoothing weights from the least-squares normal equations,
    solved exactly over the rationals."""
    half = w_length // 2
    xs = list(range(-half, half + 1))
    # gram[r][c] = sum x^(r+c); rhs = powers of center x=0
    size = poly + 1
    gram = [[Fraction(sum(x ** (r + c) for x in xs)) for c in range(size)] for r in range(size)]
    rhs = [Fraction(1)] + [Fraction(0)] * poly
    # Gaussian elimination with partial pivoting over Fractions
    for col in range(size):
        pivot = max(range(col, size), key=lambda r: abs(gram[r][col]))
        gram[col], gram[pivot] = gram[pivot], gram[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = gram[col][col]
        for r in range(size):
            if r == col:
                continue
            factor = gram[r][col] / inv
            gram[r] = [a - factor * b for a, b in zip(gram[r], gram[col])]
            rhs[r] = rhs[r] - factor * rhs[col]
    beta = [rhs[r] / gram[r][r] for r in range(size)]
    return [sum(beta[p] * x**p for p in range(size)) for x in xs]


def polyfit_filter(values, w_length: int, poly: int) -> np.ndarray:
    """Definitional smoother: independent per-position least-squares fit
    (numpy.polyfit) over the same windows the filter uses."""
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < w_length:
        deg = min(poly, n - 1)
        coefs = np.polyfit(np.arange(n), v, deg)
        return np.polyval(coefs, np.arange(n))
    half = w_length // 2
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        window = v[lo:hi]
        deg = min(poly, window.size - 1)
        coefs = np.polyfit(np.arange(lo, hi), window, deg)
        out[i] = np.polyval(coefs, i)
    return out


def count_hills_by_scan(values) -> int:
    """Plateau-aware hill count by a direct left-to-right scan."""
    v = list(np.asarray(values, dtype=float))
    runs: list[float] = []
    for x in v:
        if not runs or runs[-1] != x:
            runs.append(x)
    hills = 0
    for i, level in enumerate(runs):
        left = runs[i - 1] if i > 0 else None
        right = runs[i + 1] if i + 1 < len(runs) else None
        if (left is None or left < level) and (right is None or right < level):
            hills += 1
    return hills


def replay_smoothing(counts, w_length: int, poly: int, max_iter: int):
    """Replay the iterated clamp-and-smooth loop with the independent
    filter; returns the hill count of each pass."""
    v = np.asarray(counts, dtype=float)
    hills_per_pass: list[int] = []
    for _ in range(max_iter):
        v = np.maximum(polyfit_filter(v, w_length, poly), 0.0)
        hills_per_pass.append(count_hills_by_scan(v))
        if hills_per_pass[-1] <= 1:
            break
    return hills_per_pass


def first_occurrences(hills_per_pass) -> dict[int, int | None]:
    out: dict[int, int | None] = {1: None, 2: None, 3: None}
    for i, h in enumerate(hills_per_pass):
        if h in out and out[h] is None:
            out[h] = i
    return out


# --- quantiles and binning --------------------------------------------------


def percentile_by_sorting(values, q: float) -> float:
    """Linear-interpolation percentile computed from an explicit sort."""
    v = sorted(float(x) for x in values)
    rank = q / 100.0 * (len(v) - 1)
    lo = int(np.floor(rank))
    hi = int(np.ceil(rank))
    frac = rank - lo
    return v[lo] * (1 - frac) + v[hi] * frac


# --- k-means ----------------------------------------------------------------


def best_contiguous_partition(values, k: int):
    """Global 1-D k-means optimum by enumerating contiguous partitions
    of the sorted data; returns (sse, centroids)."""
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    best = (np.inf, None)
    for cuts in combinations(range(1, n), k - 1):
        bounds = [0, *cuts, n]
        sse = 0.0
        cents = []
        for a, b in zip(bounds[:-1], bounds[1:]):
            seg = v[a:b]
            c = seg.mean()
            cents.append(c)
            sse += float(((seg - c) ** 2).sum())
        if sse < best[0]:
            best = (sse, np.asarray(cents))
    return best


def nearest_sse(values, centroids) -> float:
    v = np.asarray(values, dtype=float)
    c = np.asarray(centroids, dtype=float)
    return float(((v[:, None] - c[None, :]) ** 2).min(axis=1).sum())


# --- partitions -------------------------------------------------------------


def brute_pair_counts(labels_a, labels_b):
    """Pair-agreement counts by explicit enumeration of all pairs."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    n = a.size
    n11 = n10 = n01 = n00 = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa = a[i] == a[j]
            sb = b[i] == b[j]
            if sa and sb:
                n11 += 1
            elif sa:
                n10 += 1
            elif sb:
                n01 += 1
            else:
                n00 += 1
    return n11, n10, n01, n00


def brute_pair_counts_vectorized(labels_a, labels_b):
    """Same enumeration over all i<j pairs, via boolean co-membership
    matrices (fast enough for thousands of partition pairs)."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    i, j = np.triu_indices(a.size, k=1)
    same_a = a[i] == a[j]
    same_b = b[i] == b[j]
    n11 = int(np.count_nonzero(same_a & same_b))
    n10 = int(np.count_nonzero(same_a & ~same_b))
    n01 = int(np.count_nonzero(~same_a & same_b))
    n00 = int(np.count_nonzero(~same_a & ~same_b))
    return n11, n10, n01, n00


def silhouette_by_loops(values, labels):
    """Textbook silhouette evaluation with explicit python loops."""
    v = np.asarray(values, dtype=float)
    lab = np.asarray(labels)
    scores = []
    for i in range(v.size):
        own = lab[i]
        same = [abs(v[i] - v[j]) for j in range(v.size) if j != i and lab[j] == own]
        if not same:
            scores.append(0.0)
            continue
        a = sum(same) / len(same)
        b = np.inf
        for other in set(lab.tolist()) - {own}:
            dists = [abs(v[i] - v[j]) for j in range(v.size) if lab[j] == other]
            b = min(b, sum(dists) / len(dists))
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return float(np.mean(scores)), np.asarray(scores)


# --- mixture densities ------------------------------------------------------


def normal_pdf(x, mean, std):
    x = np.asarray(x, dtype=float)
    return np.exp(-((x - mean) ** 2) / (2 * std**2)) / (std * np.sqrt(2 * np.pi))


def mixture_pdf(x, components):
    """components: list of (weight, mean, std)."""
    total = np.zeros_like(np.asarray(x, dtype=float))
    for weight, mean, std in components:
        total = total + weight * normal_pdf(x, mean, std)
    return total


def density_minimum(components, lo, hi, n_grid=200001) -> float:
    grid = np.linspace(lo, hi, n_grid)
    return float(grid[np.argmin(mixture_pdf(grid, components))])


# --- shared datasets --------------------------------------------------------

BIMODAL_COMPONENTS = [(0.5, 10.0, 1.0), (0.5, 25.0, np.sqrt(2.0))]
FIVE_MODE_CENTERS = (3.0, 6.5, 10.0, 21.5, 25.5)
FIVE_MODE_STD = 0.6


def bimodal_sample(seed=42, n=5000):
    rng = np.random.default_rng(seed)
    left = rng.normal(10.0, 1.0, n // 2)
    right = rng.normal(25.0, np.sqrt(2.0), n - n // 2)
    return rc.sample_from_values(np.concatenate([left, right]), "bimodal")


def five_mode_sample(seed=2, per_mode=1200):
    rng = np.random.default_rng(seed)
    parts = [rng.normal(m, FIVE_MODE_STD, per_mode) for m in FIVE_MODE_CENTERS]
    return rc.sample_from_values(np.concatenate(parts), "five-mode")


def five_mode_components():
    return [(0.2, m, FIVE_MODE_STD) for m in FIVE_MODE_CENTERS]


def three_mode_weighted_sample(seed=5):
    rng = np.random.default_rng(seed)
    parts = [
        rng.normal(0.0, 1.0, 150),
        rng.normal(10.0, 1.0, 700),
        rng.normal(20.0, 1.0, 150),
    ]
    return rc.sample_from_values(np.concatenate(parts), "three-mode")


def bump_histogram(spec, n_bins, lo, hi, sig=1.2):
    """Deterministic histogram whose counts sample a sum of Gaussian
    bumps given as (center, amplitude) pairs."""
    edges = np.linspace(lo, hi, n_bins + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    counts = np.zeros(n_bins)
    for center, amp in spec:
        counts += amp * np.exp(-((mids - center) ** 2) / (2 * sig**2))
    return rc.Histogram(edges=edges, counts=np.round(counts).astype(int))
