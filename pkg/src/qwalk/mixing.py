"""Average distributions, total variation diagnostics and mixing-time search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import COLLISION_TOL, GraphSpec, spectrum
from .walk import (
    Distribution,
    _check_time,
    instantaneous_distribution,
    map_time_chunks,
    probabilities_batch,
)

CLAMP_TOL = 1e-12
GRID_PER_2PI = 10_000
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True, eq=False)
class AverageDistribution:
    probs: np.ndarray
    collision_pair_count: int


@dataclass(frozen=True)
class MixingSearchResult:
    t_star: float
    tv_star: float
    grid_points: int
    refinement_iterations: int


def _probs(P) -> np.ndarray:
    if isinstance(P, (Distribution, AverageDistribution)):
        return np.asarray(P.probs, dtype=float)
    return np.asarray(P, dtype=float)


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def tv_distance(P, Q, convention: str = "paper") -> float:
    """Total variation distance, un-halved sum |P - Q| unless ``convention="half"``."""
    p, q = _probs(P), _probs(Q)
    if p.shape != q.shape:
        raise ValueError(f"distribution lengths differ: {p.size} vs {q.size}")
    d = float(np.abs(p - q).sum())
    if convention == "paper":
        return d
    if convention == "half":
        return d / 2
    raise ValueError(f"unknown TV convention {convention!r}")


def tv_to_uniform(P, convention: str = "paper") -> float:
    p = _probs(P)
    return tv_distance(p, uniform(p.size), convention)


def clamp_probabilities(p: np.ndarray) -> np.ndarray:
    """Zero rounding negatives in [-1e-12, 0) and renormalize; larger negatives are a bug."""
    p = np.array(p, dtype=float)
    if p.min() < -CLAMP_TOL:
        raise RuntimeError(f"probability {p.min():.3e} is negative beyond rounding")
    p[p < 0] = 0.0
    return p / p.sum()


def _unravel(flat: np.ndarray, factors: tuple) -> tuple[np.ndarray, ...]:
    return np.unravel_index(flat, factors)


def average_distribution(spec: GraphSpec, tol: float = COLLISION_TOL) -> AverageDistribution:
    """Long-run average distribution from the eigenvalue collision classes.

    With eigenvectors chi_a / sqrt(N),
    ``Pbar(l) = (1/N^2) sum_{a ~ b} chi_a(l) conj(chi_b(l))`` over pairs in the
    same class. Small classes are expanded into pair differences d = a - b and
    counted into c(d), so the sum becomes one inverse FFT of c. Classes too
    large to expand add ``|sum_{a in class} chi_a(l)|^2`` via their own FFT.
    """
    sp = spectrum(spec, tol)
    factors = tuple(spec.factors)
    n = spec.order
    classes = sp.class_members()
    sizes = np.array([len(c) for c in classes])
    pair_count = int(np.sum(sizes * (sizes - 1)))
    if pair_count == 0:
        return AverageDistribution(uniform(n), 0)

    diff_counts = np.zeros(n)
    direct = np.zeros(n)
    big_limit = max(64, math.isqrt(n))
    by_size: dict[int, list[np.ndarray]] = {}
    for members in classes:
        by_size.setdefault(len(members), []).append(members)
    for s, group in by_size.items():
        if s == 1:
            diff_counts[0] += len(group)
        elif s <= big_limit:
            block = np.stack(group)
            parts = _unravel(block, factors)
            diffs = [(p[:, :, None] - p[:, None, :]) % m for p, m in zip(parts, factors)]
            flat = np.ravel_multi_index(diffs, factors).ravel()
            diff_counts += np.bincount(flat, minlength=n)
        else:
            for members in group:
                v = np.zeros(n)
                v[members] = 1.0
                amp = np.fft.ifftn(v.reshape(factors)).ravel() * n
                direct += amp.real**2 + amp.imag**2
    folded = np.fft.ifftn(diff_counts.reshape(factors)).real.ravel() * n
    probs = clamp_probabilities((folded + direct) / n**2)
    return AverageDistribution(probs, pair_count)


def average_distribution_integrated(
    spec: GraphSpec, T: float, steps: int, *, scale: float = 1.0
) -> Distribution:
    """Composite trapezoidal estimate of (1/T) int_0^T P_t dt over ``steps`` intervals."""
    T = _check_time(T)
    if T <= 0:
        raise ValueError("T must be positive")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    ts = np.linspace(0.0, T, steps + 1)
    weights = np.full(len(ts), T / steps)
    weights[0] = weights[-1] = T / (2 * steps)
    size = max(1, (1 << 20) // spec.order)
    total = np.zeros(spec.order)
    for i in range(0, len(ts), size):
        total += weights[i : i + size] @ probabilities_batch(spec, ts[i : i + size], scale=scale)
    total /= T
    return Distribution(total)


def average_error_envelope(
    spec: GraphSpec, T: float, *, window: float | None = None, dt: float = 0.05, tol: float = COLLISION_TOL
) -> float:
    """Worst deviation of the running time average from the collision formula over [T, T + window].

    The finite-horizon error oscillates in T with the eigenvalue beat
    frequencies; its envelope decays like C/T. ``window`` defaults to eight
    periods of the slowest beat.
    """
    T = _check_time(T)
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    exact = average_distribution(spec, tol).probs
    if window is None:
        sp = spectrum(spec, tol)
        levels = np.sort([sp.eigenvalues[c[0]] for c in sp.class_members()])
        gaps = np.diff(levels)
        window = 8 * 2 * math.pi / gaps.min() if len(gaps) else 0.0
    steps = int(math.ceil((T + window) / dt))
    ts = np.arange(steps + 1) * dt
    probs_start = probabilities_batch(spec, ts[:1])[0]
    running = np.zeros(spec.order)
    prev = probs_start
    worst = 0.0
    size = max(1, (1 << 20) // spec.order)
    for i in range(1, len(ts), size):
        seg = ts[i : i + size]
        p = probabilities_batch(spec, seg)
        left = np.vstack([prev[None, :], p[:-1]])
        cum = running + np.cumsum((left + p) * (dt / 2), axis=0)
        sel = seg >= T
        if np.any(sel):
            avg = cum[sel] / seg[sel][:, None]
            worst = max(worst, float(np.abs(avg - exact).max()))
        running = cum[-1]
        prev = p[-1]
    return worst


def fourier_coefficients(P, factors) -> np.ndarray:
    """Phat(a) = sum_l P(l) chi_a(l) for every character index a (flat order)."""
    factors = tuple(int(m) for m in factors)
    p = _probs(P)
    if p.size != math.prod(factors):
        raise ValueError(f"distribution of size {p.size} does not match group order {math.prod(factors)}")
    return np.fft.ifftn(p.reshape(factors)).ravel() * p.size


def ds_bound(P, factors) -> float:
    """(1/4) sum over non-trivial characters of |Phat(a)|^2."""
    coeffs = fourier_coefficients(P, factors)
    return float(0.25 * np.sum(np.abs(coeffs[1:]) ** 2))


def _tv_single(spec: GraphSpec, t: float, scale: float) -> float:
    return tv_to_uniform(instantaneous_distribution(spec, t, scale=scale))


def golden_section_min(f, lo: float, hi: float, iters: int):
    """Golden-section search on [lo, hi]; returns every (t, f(t)) evaluated, in order."""
    seen = []
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    seen += [(x1, f1), (x2, f2)]
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
            seen.append((x1, f1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
            seen.append((x2, f2))
    return seen


def search_min_tv(
    spec: GraphSpec,
    t_max: float,
    grid: int | None = None,
    refine_iters: int = 40,
    *,
    scale: float = 1.0,
    tie_tol: float = 1e-15,
) -> MixingSearchResult:
    """Smallest TV(P_t, U) over [0, t_max]: uniform grid scan, then golden-section refinement.

    ``grid`` defaults to 10^4 points per 2 pi. Ties within ``tie_tol`` go to
    the smallest t, both on the grid and after refinement.
    """
    t_max = _check_time(t_max)
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if grid is None:
        grid = max(2, math.ceil(GRID_PER_2PI * t_max / (2 * math.pi)))
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if refine_iters < 0:
        raise ValueError("refine_iters must be >= 0")
    ts = np.linspace(0.0, t_max, grid)
    n = spec.order
    u = 1.0 / n

    def tv_chunk(seg):
        return np.abs(probabilities_batch(spec, seg, scale=scale) - u).sum(axis=1)

    tv = np.concatenate(map_time_chunks(tv_chunk, ts, n))
    best = int(np.flatnonzero(tv <= tv.min() + tie_tol)[0])
    lo, hi = ts[max(best - 1, 0)], ts[min(best + 1, grid - 1)]

    def f(t):
        return _tv_single(spec, t, scale)

    candidates = [(float(ts[best]), f(ts[best]))]
    if refine_iters > 0:
        candidates += golden_section_min(f, lo, hi, refine_iters)
    fmin = min(v for _, v in candidates)
    t_star = min(t for t, v in candidates if v <= fmin + tie_tol)
    return MixingSearchResult(float(t_star), f(t_star), grid, refine_iters)


def is_average_uniform(spec: GraphSpec, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return tv_to_uniform(average_distribution(spec)) <= tol
