"""Numerical verification suite for the walk identities, run by ``qwalk verify``.

Each check evaluates an identity at random times and records the largest
residual seen. Cycle checks compare reduced amplitude forms against the direct
spectral sum; every family also checks unitarity, FFT against direct
evaluation, and the collision-class average against a time integral.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .graphs import (
    GraphSpec,
    adjacency_matrix,
    graph_from_dict,
    make_complete,
    make_cycle,
    make_hypercube,
    negation_index,
    spectrum,
)
from .mixing import average_distribution, average_distribution_integrated
from .walk import (
    cycle_amplitudes_direct,
    evolve,
    paired_form_amplitudes,
    quarter_form_amplitudes,
)

IDENTITY_TOL = 1e-10
ORACLE_TOL = 1e-2
ORACLE_T = 1000.0
ORACLE_DT = 0.05
DIRECT_CAP = 512


@dataclass
class Check:
    name: str
    family: str
    tolerance: float
    max_residual: float = 0.0
    cases: int = 0
    passed: bool = True

    def record(self, residual: float) -> None:
        residual = float(residual)
        self.cases += 1
        if not residual <= self.max_residual:
            self.max_residual = residual if math.isfinite(residual) else math.inf
        self.passed = self.max_residual < self.tolerance

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Suite:
    family: str
    tol: float = IDENTITY_TOL
    checks: dict = field(default_factory=dict)

    def check(self, name: str, tolerance: float | None = None) -> Check:
        if name not in self.checks:
            self.checks[name] = Check(name, self.family, self.tol if tolerance is None else tolerance)
        return self.checks[name]


def _times(seed: int, key: int, count: int, t_max: float) -> np.ndarray:
    return np.random.default_rng([seed, key]).uniform(0.0, t_max, count)


def _divisors(n: int) -> list[int]:
    return [m for m in range(1, n + 1) if n % m == 0]


def _generic_checks(suite: Suite, spec: GraphSpec, times: np.ndarray, oracle_T: float) -> None:
    for t in times:
        amps = evolve(spec, t).amps
        suite.check("unitarity").record(abs(np.sum(np.abs(amps) ** 2) - 1))
        if spec.order <= DIRECT_CAP:
            direct = evolve(spec, t, method="direct").amps
            suite.check("fft_matches_direct_sum").record(np.abs(amps - direct).max())
    if spec.order <= DIRECT_CAP:
        dense = np.linalg.eigvalsh(adjacency_matrix(spec))
        fast = np.sort(spectrum(spec).eigenvalues)
        suite.check("eigenvalues_match_dense_solver").record(np.abs(dense - fast).max())
    exact = average_distribution(spec).probs
    lam = spectrum(spec).eigenvalues
    dt = min(ORACLE_DT, 0.2 / max(np.ptp(lam), 1e-12))
    steps = max(2, int(math.ceil(oracle_T / dt)))
    integrated = average_distribution_integrated(spec, oracle_T, steps).probs
    suite.check("average_matches_time_integral", ORACLE_TOL).record(np.abs(exact - integrated).max())
    suite.check("average_symmetric_under_negation", 1e-12).record(
        np.abs(exact - exact[negation_index(spec.factors)]).max()
    )


def verify_cycles(ns: Iterable[int], times_per_n: int = 20, t_max: float = 100.0, seed: int = 0,
                  tol: float = IDENTITY_TOL, oracle_T: float = ORACLE_T) -> list[Check]:
    suite = Suite("cycle", tol)
    for n in ns:
        times = _times(seed, n, times_per_n, t_max)
        for t in times:
            direct = cycle_amplitudes_direct(n, t)
            amps = evolve(make_cycle(n), t).amps
            suite.check("evolve_matches_direct_sum").record(np.abs(amps - direct).max())
            for m in _divisors(n):
                grained = amps.reshape(n // m, m).sum(axis=0)
                suite.check("coarse_grain_sum").record(np.abs(grained - cycle_amplitudes_direct(m, t)).max())
            if n % 2:
                continue
            suite.check("paired_amplitude_form").record(np.abs(paired_form_amplitudes(n, t) - direct).max())
            suite.check("quarter_amplitude_form").record(np.abs(quarter_form_amplitudes(n, t) - direct).max())
            even, odd = amps[0::2].sum(), amps[1::2].sum()
            suite.check("parity_sums").record(
                max(abs(even - math.cos(2 * t)), abs(odd + 1j * math.sin(2 * t)))
            )
            suite.check("real_imaginary_parity").record(
                max(np.abs(amps[0::2].imag).max(), np.abs(amps[1::2].real).max())
            )
            doubled = evolve(make_cycle(2 * n), t).amps
            js = np.arange(n)
            folded = doubled[js] + doubled[(n - js) % (2 * n)]
            suite.check("two_to_one_fold").record(np.abs(folded - direct).max())
        _generic_checks(suite, make_cycle(n), times[:2], oracle_T)
    return list(suite.checks.values())


def verify_complete(ns: Iterable[int], times_per_n: int = 20, t_max: float = 100.0, seed: int = 0,
                    tol: float = IDENTITY_TOL, oracle_T: float = ORACLE_T) -> list[Check]:
    suite = Suite("complete", tol)
    for n in ns:
        spec = make_complete(n)
        times = _times(seed, n, times_per_n, t_max)
        for t in times:
            p = np.abs(evolve(spec, t).amps) ** 2
            suite.check("off_start_probabilities_equal").record(np.ptp(p[1:]) if n > 2 else 0.0)
        pbar = average_distribution(spec).probs
        expected = np.full(n, 2 / n**2)
        expected[0] = 1 - 2 * (n - 1) / n**2
        if n == 2:
            expected[:] = 0.5
        suite.check("average_closed_form", 1e-12).record(np.abs(pbar - expected).max())
        _generic_checks(suite, spec, times[:2], oracle_T)
    return list(suite.checks.values())


def verify_hypercubes(ds: Iterable[int], times_per_n: int = 20, t_max: float = 100.0, seed: int = 0,
                      tol: float = IDENTITY_TOL, oracle_T: float = ORACLE_T) -> list[Check]:
    suite = Suite("hypercube", tol)
    for d in ds:
        spec = make_hypercube(d)
        sp = spectrum(spec)
        sizes = sorted(len(c) for c in sp.class_members())
        binom = sorted(math.comb(d, w) for w in range(d + 1))
        suite.check("eigenvalue_multiplicities_binomial").record(0.0 if sizes == binom else math.inf)
        _generic_checks(suite, spec, _times(seed, d, times_per_n, t_max), oracle_T)
    return list(suite.checks.values())


def verify_graph(spec: GraphSpec, times_per_n: int = 20, t_max: float = 100.0, seed: int = 0,
                 tol: float = IDENTITY_TOL, oracle_T: float = ORACLE_T) -> list[Check]:
    suite = Suite("graph", tol)
    _generic_checks(suite, spec, _times(seed, spec.order, times_per_n, t_max), oracle_T)
    return list(suite.checks.values())


def _range(value, name: str) -> range:
    if isinstance(value, list):
        if len(value) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ValueError(f"field {name!r} range must be [lo, hi] integers")
        lo, hi = value
        if lo > hi:
            raise ValueError(f"empty range for {name!r}: [{lo}, {hi}]")
        return range(lo, hi + 1)
    if isinstance(value, int) and not isinstance(value, bool):
        return range(value, value + 1)
    raise ValueError(f"field {name!r} must be an integer or [lo, hi]")


def run_suite(graph: dict, *, times_per_n: int = 20, t_max: float = 100.0, seed: int = 0,
              tol: float = IDENTITY_TOL, oracle_T: float = ORACLE_T) -> list[Check]:
    """Dispatch on a graph object; cycle/complete/hypercube accept an inclusive [lo, hi] size range."""
    kind = graph.get("type") if isinstance(graph, dict) else None
    kw = dict(times_per_n=times_per_n, t_max=t_max, seed=seed, tol=tol, oracle_T=oracle_T)
    if kind in ("cycle", "complete") and "n" in graph:
        ns = _range(graph["n"], "n")
        if ns.start < 2:
            raise ValueError("sizes must be >= 2")
        return (verify_cycles if kind == "cycle" else verify_complete)(ns, **kw)
    if kind == "hypercube" and "d" in graph:
        ds = _range(graph["d"], "d")
        if ds.start < 1:
            raise ValueError("hypercube dimensions must be >= 1")
        return verify_hypercubes(ds, **kw)
    return verify_graph(graph_from_dict(graph), **kw)
