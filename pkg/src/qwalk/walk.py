"""Continuous-time quantum walk started at vertex 0 of a group circulant.

The walk is ``psi(t) = exp(-i s t A) |0>`` with Hamiltonian scale ``s``
(default 1, i.e. the adjacency matrix itself). Every circulant is
vertex-transitive, so a walk from vertex ``v`` is the vertex-0 walk rotated by
``v``; only the vertex-0 walk is exposed.

Amplitudes are the inverse character transform of the phases:
``<j|psi(t)> = (1/N) sum_a exp(-i s lambda_a t) chi_a(j)``, evaluated with an
n-dimensional inverse FFT. ``evolve(..., method="direct")`` is the O(N^2) sum.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import DENSE_CAP, GraphSpec, ResourceLimitError, eigenvalue_array, make_cycle

TWO_PI = 2 * math.pi
CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True, eq=False)
class AmplitudeVector:
    t: float
    amps: np.ndarray

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True, eq=False)
class Distribution:
    probs: np.ndarray

    def __len__(self) -> int:
        return len(self.probs)


def _check_time(t) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    return t


def _phases(lam: np.ndarray, t) -> np.ndarray:
    """exp(-i lam t).

    cos/sin reduce their argument against the exact 2 pi internally, so the
    product lam * t is passed unreduced; an explicit fmod by the rounded 2 pi
    would add error at large t rather than remove it.
    """
    ang = np.multiply.outer(t, lam)
    out = np.empty(np.shape(ang), dtype=complex)
    np.cos(ang, out=out.real)
    np.sin(ang, out=out.imag)
    np.negative(out.imag, out=out.imag)
    return out


def _phase_table(lam: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Phases for many times, evaluating trig only once per distinct eigenvalue."""
    levels, inverse = np.unique(lam, return_inverse=True)
    if len(levels) > 0.75 * len(lam):
        return _phases(lam, ts)
    return _phases(levels, ts)[:, inverse]


def evolve(spec: GraphSpec, t: float, *, method: str = "fft", scale: float = 1.0) -> AmplitudeVector:
    """Amplitude vector at time ``t`` of the walk started at vertex 0."""
    t = _check_time(t)
    lam = eigenvalue_array(spec) * scale
    if method == "fft":
        amps = np.fft.ifftn(_phases(lam, t).reshape(spec.factors)).ravel()
    elif method == "direct":
        amps = character_matrix(spec) @ _phases(lam, t) / spec.order
    else:
        raise ValueError(f"unknown method {method!r}")
    return AmplitudeVector(t, amps)


def character_matrix(spec: GraphSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense X[j, a] = chi_a(j); phases use exact integer reduction."""
    n = spec.order
    if n > cap:
        raise ResourceLimitError(f"character matrix of order {n} exceeds cap {cap}")
    grid = [g.ravel() for g in np.indices(spec.factors)]
    frac = np.zeros((n, n))
    for g, m in zip(grid, spec.factors):
        frac += np.remainder(np.multiply.outer(g, g), m) / m
    return np.exp(2j * np.pi * frac)


def thread_count() -> int:
    """Worker cap from QWALK_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("QWALK_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"QWALK_THREADS must be an integer, got {raw!r}") from None
    if k < 0:
        raise ValueError("QWALK_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


def map_time_chunks(func: Callable[[np.ndarray], np.ndarray], times: np.ndarray, order: int) -> list:
    """Apply ``func`` to fixed-size consecutive chunks of ``times``.

    Chunk boundaries depend only on ``len(times)`` and ``order``, and results
    come back in chunk order, so output is independent of the thread count.
    """
    size = max(1, CHUNK_ELEMENTS // max(order, 1))
    chunks = [times[i : i + size] for i in range(0, len(times), size)]
    workers = min(thread_count(), len(chunks))
    if workers <= 1:
        return [func(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, chunks))


def _batch_amps(spec: GraphSpec, lam: np.ndarray, ts: np.ndarray) -> np.ndarray:
    ph = _phase_table(lam, ts).reshape((len(ts),) + tuple(spec.factors))
    axes = tuple(range(1, ph.ndim))
    return np.fft.ifftn(ph, axes=axes).reshape(len(ts), -1)


def evolve_batch(spec: GraphSpec, times, *, scale: float = 1.0) -> np.ndarray:
    """Amplitudes for every time in ``times`` as an array of shape (len(times), N)."""
    ts = np.asarray(times, dtype=float).ravel()
    if not np.all(np.isfinite(ts)):
        raise ValueError("times must be finite")
    lam = eigenvalue_array(spec) * scale
    parts = map_time_chunks(lambda c: _batch_amps(spec, lam, c), ts, spec.order)
    return np.concatenate(parts) if parts else np.empty((0, spec.order), complex)


def probabilities_batch(spec: GraphSpec, times, *, scale: float = 1.0) -> np.ndarray:
    ts = np.asarray(times, dtype=float).ravel()
    if not np.all(np.isfinite(ts)):
        raise ValueError("times must be finite")
    lam = eigenvalue_array(spec) * scale
    parts = map_time_chunks(lambda c: np.abs(_batch_amps(spec, lam, c)) ** 2, ts, spec.order)
    return np.concatenate(parts) if parts else np.empty((0, spec.order))


def instantaneous_distribution(spec: GraphSpec, t: float, *, scale: float = 1.0) -> Distribution:
    return Distribution(np.abs(evolve(spec, t, scale=scale).amps) ** 2)


# Reduced forms for cycles. Each is checked against the direct sum below.


def cycle_amplitudes_direct(n: int, t: float) -> np.ndarray:
    """<j|psi_n(t)> = (1/n) sum_k exp(-i lambda_k t) w^{jk}, lambda_k = 2 cos(2 pi k/n).

    Valid for every n >= 1 (n = 2 is the doubled-edge C_2, n = 1 a doubled loop).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = _check_time(t)
    k = np.arange(n)
    lam = 2 * np.cos(TWO_PI * k / n)
    w = np.exp(2j * np.pi * (np.multiply.outer(k, k) % n) / n)
    return w @ _phases(lam, t) / n


def _even_cycle_args(n: int, j: int | None = None) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"n must be an even integer >= 2, got {n}")
    if j is not None and not 0 <= j < n:
        raise ValueError(f"vertex {j} outside [0, {n})")


def _vertices(n: int, j) -> np.ndarray:
    js = np.arange(n) if j is None else np.atleast_1d(np.asarray(j, dtype=np.int64))
    if np.any((js < 0) | (js >= n)):
        raise ValueError(f"vertex outside [0, {n})")
    return js


def _eps(lam, js: np.ndarray, t: float) -> np.ndarray:
    """e^{-i lam t} + (-1)^j e^{i lam t}, shape (len(js), len(lam))."""
    ph = np.atleast_1d(_phases(lam, t))
    sign = np.where(js % 2, -1.0, 1.0)[:, None]
    return ph[None, :] + sign * np.conj(ph)[None, :]


def _cos_jk(n: int, js: np.ndarray, k: np.ndarray) -> np.ndarray:
    return np.cos(TWO_PI * (np.multiply.outer(js, k) % n) / n)


def paired_form_amplitudes(n: int, t: float, j=None) -> np.ndarray:
    """Even cycle amplitudes with the k <-> n-k eigenvalue pairs merged."""
    _even_cycle_args(n)
    t = _check_time(t)
    js = _vertices(n, j)
    k = np.arange(1, n // 2)
    lam = 2 * np.cos(TWO_PI * k / n)
    sign = np.where(js % 2, -1.0, 1.0)
    total = np.exp(-2j * t) + sign * np.exp(2j * t)
    total = total + 2 * (_cos_jk(n, js, k) @ np.atleast_1d(_phases(lam, t)))
    return total / n


def quarter_form_amplitudes(n: int, t: float, j=None) -> np.ndarray:
    """Even cycle amplitudes folded to a quarter of the spectrum.

    Uses lambda_{n/2-k} = -lambda_k for 1 <= k < n/4. When 4 | n the
    self-paired k = n/4 term (lambda = 0) contributes (2/n) cos(pi j / 2) and
    is added explicitly.
    """
    _even_cycle_args(n)
    t = _check_time(t)
    js = _vertices(n, j)
    k = np.arange(1, n)
    k = k[4 * k < n]
    lam = 2 * np.cos(TWO_PI * k / n)
    total = _eps(np.array([2.0]), js, t)[:, 0]
    if len(k):
        total = total + 2 * np.sum(_eps(lam, js, t) * _cos_jk(n, js, k), axis=1)
    if n % 4 == 0:
        total = total + 2 * np.array([1.0, 0.0, -1.0, 0.0])[js % 4]
    return total / n


def amplitude_fact(n: int, j: int, t: float) -> complex:
    _even_cycle_args(n, j)
    return complex(paired_form_amplitudes(n, t, j)[0])


def amplitude_even_cycle(n: int, j: int, t: float) -> complex:
    """<j|psi_n(t)> on an even cycle from the quarter-spectrum form."""
    _even_cycle_args(n, j)
    return complex(quarter_form_amplitudes(n, t, j)[0])


def parity_sums(n: int, t: float) -> tuple[complex, complex]:
    """(sum of even-vertex amplitudes, sum of odd-vertex amplitudes) on C_n."""
    _even_cycle_args(n)
    amps = evolve(make_cycle(n), t).amps
    return complex(amps[0::2].sum()), complex(amps[1::2].sum())


def coarse_grain(n: int, m: int, t: float) -> np.ndarray:
    """Entry a is the sum of C_n amplitudes over vertices j = a (mod m)."""
    if m < 1 or n % m:
        raise ValueError(f"m = {m} does not divide n = {n}")
    amps = evolve(make_cycle(n), t).amps
    return amps.reshape(n // m, m).sum(axis=0)


def fold_pair(n: int, j: int, t: float) -> complex:
    """<j|psi_2n(t)> + <n-j|psi_2n(t)>, which equals <j|psi_n(t)>."""
    _even_cycle_args(n, j)
    amps = evolve(make_cycle(2 * n), t).amps
    return complex(amps[j] + amps[(n - j) % (2 * n)])
