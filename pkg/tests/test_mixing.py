import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk.graphs import (
    adjacency_matrix,
    make_circulant,
    make_complete,
    make_cycle,
    make_group_circulant,
    make_hypercube,
    negation_index,
    spectrum,
)
from qwalk.mixing import (
    average_distribution,
    average_distribution_integrated,
    average_error_envelope,
    clamp_probabilities,
    ds_bound,
    fourier_coefficients,
    golden_section_min,
    is_average_uniform,
    search_min_tv,
    tv_distance,
    tv_to_uniform,
    uniform,
)
from qwalk.walk import instantaneous_distribution


def projector_average(spec):
    """Independent oracle: sum over eigenspaces of |<l|Pi_lambda|0>|^2 from a dense eigensolver."""
    w, v = np.linalg.eigh(adjacency_matrix(spec).astype(float))
    out = np.zeros(spec.order)
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > 1e-7:
            block = v[:, start:i]
            out += (block @ block[0].conj()) ** 2
            start = i
    return out


def cycle_average_by_pairs(n):
    """Exact rationals from the structural collision pairs k <-> n - k."""
    pairs = [(j, k) for j in range(n) for k in range(n) if j == k or j + k == n]
    out = []
    for ell in range(n):
        s = sum(np.exp(2j * np.pi * ((j - k) * ell % n) / n) for j, k in pairs)
        out.append(s.real / n**2)
    return np.array(out), len(pairs) - n


class TestTV:
    def test_examples(self):
        p = np.array([0.2, 0.3, 0.5])
        assert tv_distance(p, p) == 0
        assert tv_distance([1, 0, 0, 0], uniform(4)) == pytest.approx(1.5)
        assert tv_distance([1, 0, 0, 0], uniform(4), convention="half") == pytest.approx(0.75)

    @pytest.mark.parametrize("n", [3, 5, 32])
    def test_complete_average(self, n):
        tv = tv_to_uniform(average_distribution(make_complete(n)))
        assert tv == pytest.approx(2 * (1 - 1 / n) * (1 - 2 / n), abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            tv_distance([1, 0], [1, 0, 0])
        with pytest.raises(ValueError):
            tv_distance([1, 0], [1, 0], convention="full")

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
    def test_range(self, raw):
        p = np.array(raw) + 1e-3
        p /= p.sum()
        q = uniform(len(p))
        d = tv_distance(p, q)
        assert 0 <= d <= 2
        assert d == pytest.approx(2 * tv_distance(p, q, convention="half"))


class TestAverage:
    def test_c3(self):
        avg = average_distribution(make_cycle(3))
        np.testing.assert_allclose(avg.probs, [5 / 9, 2 / 9, 2 / 9], atol=1e-15)
        assert avg.collision_pair_count == 2

    def test_c2(self):
        np.testing.assert_allclose(average_distribution(make_cycle(2)).probs, [0.5, 0.5], atol=1e-15)

    @pytest.mark.parametrize("n", range(3, 33))
    def test_complete_closed_form(self, n):
        p = average_distribution(make_complete(n)).probs
        assert p[0] == pytest.approx(1 - 2 * (n - 1) / n**2, abs=1e-12)
        assert np.abs(p[1:] - 2 / n**2).max() < 1e-12

    @pytest.mark.parametrize("n", range(2, 60))
    def test_cycle_against_pair_enumeration(self, n):
        avg = average_distribution(make_cycle(n))
        brute, count = cycle_average_by_pairs(n)
        assert np.abs(avg.probs - brute).max() < 1e-12
        assert avg.collision_pair_count == count

    @pytest.mark.parametrize("n", range(3, 102, 2))
    def test_odd_cycle_closed_form(self, n):
        p = average_distribution(make_cycle(n)).probs
        assert p[0] == pytest.approx((2 * n - 1) / n**2, abs=1e-12)
        assert np.abs(p[1:] - (n - 1) / n**2).max() < 1e-12
        assert tv_to_uniform(p) == pytest.approx(2 * (n - 1) / n**2, abs=1e-12)

    @pytest.mark.parametrize("n", range(4, 102, 2))
    def test_even_cycle_closed_form(self, n):
        p = average_distribution(make_cycle(n)).probs
        expected = np.full(n, (n - 2) / n**2)
        expected[0] = expected[n // 2] = (2 * n - 2) / n**2
        assert np.abs(p - expected).max() < 1e-12
        assert tv_to_uniform(p) == pytest.approx(4 * (n - 2) / n**2, abs=1e-12)

    def test_tv_times_n_bounded(self):
        worst = max(tv_to_uniform(average_distribution(make_cycle(n))) * n for n in range(3, 513))
        assert worst <= 4

    @pytest.mark.parametrize(
        "spec",
        [make_cycle(10), make_complete(7), make_hypercube(4), make_circulant(12, {1, 11, 3, 9, 6}),
         make_group_circulant([2, 6], [(1, 0), (0, 1), (0, 5), (1, 3)]),
         make_group_circulant([3, 3, 2], [(1, 0, 0), (2, 0, 0), (0, 1, 1), (0, 2, 1)])],
        ids=["C10", "K7", "Q4", "circ12", "Z2xZ6", "Z3xZ3xZ2"],
    )
    def test_matches_spectral_projectors(self, spec):
        np.testing.assert_allclose(average_distribution(spec).probs, projector_average(spec), atol=1e-12)

    @st.composite
    @staticmethod
    def group_specs(draw):
        factors = draw(st.lists(st.integers(2, 6), min_size=1, max_size=3))
        gens = draw(st.lists(st.tuples(*[st.integers(0, m - 1) for m in factors]), min_size=1, max_size=4))
        conn = {x for g in gens if any(g) for x in (g, tuple((-v) % m for v, m in zip(g, factors)))}
        if not conn:
            conn = {tuple([1] + [0] * (len(factors) - 1)), tuple([factors[0] - 1] + [0] * (len(factors) - 1))}
        return make_group_circulant(factors, conn)

    @given(group_specs())
    @settings(max_examples=40, deadline=None)
    def test_properties(self, spec):
        p = average_distribution(spec).probs
        assert abs(p.sum() - 1) < 1e-10
        assert p.min() >= 0
        assert np.abs(p - p[negation_index(spec.factors)]).max() <= 1e-12
        np.testing.assert_allclose(p, projector_average(spec), atol=1e-10)

    def test_large_classes_use_fft_path(self):
        # K_n has one class of size n - 1, which exceeds the pair-expansion cutoff
        n = 300
        p = average_distribution(make_complete(n)).probs
        assert p[0] == pytest.approx(1 - 2 * (n - 1) / n**2, abs=1e-12)

    def test_clamp(self):
        np.testing.assert_allclose(clamp_probabilities(np.array([0.5, 0.5, -1e-13])), [0.5, 0.5, 0.0])
        with pytest.raises(RuntimeError):
            clamp_probabilities(np.array([0.6, 0.5, -1e-3]))


class TestIntegratedOracle:
    def test_c3(self):
        p = average_distribution_integrated(make_cycle(3), 2e4, 400_000).probs
        assert np.abs(p - [5 / 9, 2 / 9, 2 / 9]).max() < 1e-3

    @pytest.mark.parametrize("k", [1, 2, 7])
    def test_c2_full_periods(self, k):
        p = average_distribution_integrated(make_cycle(2), k * math.pi / 2, 2000).probs
        np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-12)

    @pytest.mark.parametrize("spec", [make_cycle(6), make_complete(5), make_hypercube(3)])
    def test_short_horizon_is_point_mass(self, spec):
        p = average_distribution_integrated(spec, 1e-6, 10).probs
        assert p[0] == pytest.approx(1, abs=1e-10)

    def test_errors(self):
        with pytest.raises(ValueError):
            average_distribution_integrated(make_cycle(3), math.inf, 10)
        with pytest.raises(ValueError):
            average_distribution_integrated(make_cycle(3), 1.0, 1)
        with pytest.raises(ValueError):
            average_distribution_integrated(make_cycle(3), -1.0, 10)

    @pytest.mark.parametrize(
        "spec",
        [make_complete(4), make_complete(8), make_hypercube(3),
         make_group_circulant([2, 4], [(1, 0), (0, 1), (0, 3)]),
         make_group_circulant([3, 3], [(1, 0), (2, 0), (0, 1), (0, 2)]), make_cycle(16)],
        ids=["K4", "K8", "Q3", "Z2xZ4", "Z3xZ3", "C16"],
    )
    def test_error_decays_like_inverse_horizon(self, spec):
        dt = min(0.05, 0.2 / np.ptp(spectrum(spec).eigenvalues))
        exact = average_distribution(spec).probs
        steps = int(math.ceil(2e4 / dt))
        assert np.abs(average_distribution_integrated(spec, 2e4, steps).probs - exact).max() < 1e-2
        e1 = average_error_envelope(spec, 2e4, dt=dt)
        e2 = average_error_envelope(spec, 4e4, dt=dt)
        assert 0.35 <= e2 / e1 <= 0.65


class TestFourier:
    def test_uniform(self):
        c = fourier_coefficients(uniform(12), (12,))
        assert c[0] == pytest.approx(1)
        assert np.abs(c[1:]).max() < 1e-15

    def test_point_mass(self):
        p = np.zeros(8)
        p[0] = 1
        np.testing.assert_allclose(fourier_coefficients(p, (2, 2, 2)), np.ones(8))

    def test_matches_character_sum(self):
        spec = make_group_circulant([3, 4], [(1, 0), (2, 0), (0, 1), (0, 3)])
        p = average_distribution(spec).probs
        coeffs = fourier_coefficients(p, (3, 4))
        for a in range(12):
            a1, a2 = divmod(a, 4)
            direct = sum(
                p[x] * np.exp(2j * np.pi * (a1 * (x // 4) / 3 + a2 * (x % 4) / 4)) for x in range(12)
            )
            assert abs(coeffs[a] - direct) < 1e-14

    @pytest.mark.parametrize("n", range(3, 102, 2))
    def test_odd_cycle(self, n):
        c = fourier_coefficients(average_distribution(make_cycle(n)), (n,))
        assert c[0] == pytest.approx(1, abs=1e-14)
        assert np.abs(c[1:] - 1 / n).max() < 1e-12
        assert ds_bound(average_distribution(make_cycle(n)), (n,)) == pytest.approx((n - 1) / (4 * n**2), abs=1e-12)

    def test_c3_ds_value_is_below_true_tv(self):
        p = average_distribution(make_cycle(3))
        assert ds_bound(p, (3,)) == pytest.approx(1 / 18, abs=1e-15)
        assert tv_to_uniform(p) == pytest.approx(4 / 9)
        # the quantity bounds the square of the halved distance, not the distance itself
        assert tv_to_uniform(p, "half") ** 2 <= ds_bound(p, (3,)) + 1e-15

    @pytest.mark.parametrize("n", [4, 6, 10])
    def test_even_cycle_coefficients(self, n):
        c = fourier_coefficients(average_distribution(make_cycle(n)), (n,))
        ell = np.arange(n)
        brute, _ = cycle_average_by_pairs(n)
        for a in range(n):
            assert abs(c[a] - np.sum(brute * np.exp(2j * np.pi * a * ell / n))) < 1e-12

    def test_uniform_ds_zero_and_errors(self):
        assert ds_bound(uniform(9), (3, 3)) == pytest.approx(0, abs=1e-30)
        with pytest.raises(ValueError):
            fourier_coefficients(uniform(9), (2, 4))


class TestSearch:
    def test_c2(self):
        res = search_min_tv(make_cycle(2), math.pi, 1000)
        assert res.tv_star < 1e-9
        assert res.t_star == pytest.approx(math.pi / 8, abs=1e-6)
        assert res.grid_points == 1000 and res.refinement_iterations == 40

    def test_hypercube_d3(self):
        res = search_min_tv(make_hypercube(3), 4 * math.pi, 10_000)
        assert res.tv_star < 1e-6
        # uniform at every odd multiple of pi/4; ties go to the earliest
        ratio = res.t_star / (math.pi / 4)
        assert abs(ratio - round(ratio)) < 1e-6 and round(ratio) % 2 == 1

    def test_c12_floor(self):
        res = search_min_tv(make_cycle(12), 20 * math.pi, 100_000)
        assert res.tv_star > 1e-3

    @pytest.mark.parametrize("spec", [make_cycle(7), make_hypercube(2), make_complete(5)])
    def test_reported_value_recomputes(self, spec):
        res = search_min_tv(spec, 10.0, 2000)
        assert res.tv_star >= 0
        again = tv_to_uniform(instantaneous_distribution(spec, res.t_star))
        assert abs(again - res.tv_star) <= 1e-12

    def test_thread_independence(self, monkeypatch):
        results = []
        for threads in ("1", "4"):
            monkeypatch.setenv("QWALK_THREADS", threads)
            results.append(search_min_tv(make_cycle(10), 100.0, 200_000))
        assert results[0] == results[1]

    def test_default_grid_density(self):
        res = search_min_tv(make_cycle(5), 4 * math.pi)
        assert res.grid_points == 20_000

    @pytest.mark.parametrize("args", [(0.0, 10), (-1.0, 10), (1.0, 1), (math.nan, 10)])
    def test_bad_ranges(self, args):
        with pytest.raises(ValueError):
            search_min_tv(make_cycle(4), *args)

    def test_golden_section(self):
        pts = golden_section_min(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 40)
        best = min(pts, key=lambda p: p[1])
        assert best[0] == pytest.approx(0.3, abs=1e-7)


class TestAverageUniform:
    def test_c2(self):
        assert is_average_uniform(make_cycle(2), 1e-12)

    @pytest.mark.parametrize("n", range(3, 65))
    def test_cycles(self, n):
        assert not is_average_uniform(make_cycle(n), 1e-9)

    @pytest.mark.parametrize("d", range(2, 9))
    def test_hypercubes(self, d):
        assert not is_average_uniform(make_hypercube(d), 1e-9)

    def test_negative_tol(self):
        with pytest.raises(ValueError):
            is_average_uniform(make_cycle(3), -1.0)


def test_exact_c3_rational():
    # hand enumeration: pairs (1, 2) and (2, 1) each add 2 cos(2 pi l / 3) / 9 off the diagonal
    expected = [Fraction(3, 9) + Fraction(2, 9) * (1 if ell == 0 else Fraction(-1, 2)) for ell in range(3)]
    assert [float(x) for x in expected] == pytest.approx([5 / 9, 2 / 9, 2 / 9])
    np.testing.assert_allclose(average_distribution(make_cycle(3)).probs, [float(x) for x in expected], atol=1e-15)
