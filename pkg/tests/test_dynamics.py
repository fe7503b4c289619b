"""Orbits, Birkhoff sums, exponential sums and skew-product character sums."""

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergorate.arithmetic import Frequency, PartialQuotients, expand_cf
from ergorate.dynamics import (SystemSpec, TorusPoint,
                               birkhoff_sum, char_birkhoff_skew, exp_sum_avg,
                               exp_sum_avg_fp, exp_sum_direct, iterate,
                               kernel_sum, step, sup_deviation)
from ergorate.errors import DimensionTooLarge
from ergorate.kernels import Holder, Observable, make_cos, make_coboundary, \
    make_dist_pow

BITS = 192
ONE = 1 << BITS


@pytest.fixture(scope="module")
def rot(golden):
    return SystemSpec.rotation(golden, BITS)


class TestTorusPoint:
    def test_wraparound_exact(self):
        x = TorusPoint((ONE - 1,), BITS)
        y = x.translate((2,))
        assert y.coords == (1,)

    def test_from_floats_reduces(self):
        x = TorusPoint.from_floats([1.25, -0.25], BITS)
        assert np.allclose(x.to_floats(), [0.25, 0.75])

    def test_rejects_unreduced(self):
        with pytest.raises(ValueError):
            TorusPoint((ONE,), BITS)


class TestIterate:
    def test_rotation_identity(self, rot):
        x = TorusPoint.from_floats([0.25], BITS)
        assert iterate(rot, x, 0).coords == x.coords

    def test_rotation_matches_wide_product(self, rot, golden):
        # orbit advanced step by step equals frac(x + N*omega) exactly
        w = golden.fixed_point(BITS)
        x = TorusPoint.from_floats([0.123], BITS)
        z = x
        N = 10 ** 5
        for _ in range(N):
            z = step(rot, z)
        assert z.coords[0] == (x.coords[0] + N * w) % ONE

    def test_orbit_accumulation_drift_free_1e7(self, golden):
        # the accumulation scheme used by the orbit generators carries zero
        # drift: after 1e7 exact additions the state equals the wide product
        w = golden.fixed_point(BITS)
        x0 = TorusPoint.from_floats([0.123], BITS).coords[0]
        c = x0
        N = 10 ** 7
        for _ in range(N):
            c = (c + w) % ONE
        assert c == (x0 + N * w) % ONE

    def test_orbit_generator_matches_wide_product(self, rot, golden):
        from ergorate.dynamics import rotation_orbit_floats

        w = golden.fixed_point(BITS)
        x = TorusPoint.from_floats([0.375], BITS)
        N = 10 ** 6
        last = None
        for buf in rotation_orbit_floats(rot, x, N):
            last = buf[-1]
        expect = ((x.coords[0] + (N - 1) * w) % ONE) / ONE
        assert last == expect  # same exact integer, same rounding

    def test_skew_two_steps_manual(self, golden):
        sys = SystemSpec.skew(2, golden, BITS)
        w = golden.fixed_point(BITS)
        x = TorusPoint.from_floats([0.3, 0.7], BITS)
        got = iterate(sys, x, 2)
        expect = ((x.coords[0] + 2 * x.coords[1] + w) % ONE,
                  (x.coords[1] + 2 * w) % ONE)
        assert got.coords == expect

    def test_skew_d3_j7_composition(self, golden, rng):
        sys = SystemSpec.skew(3, golden, BITS)
        x = TorusPoint.from_floats(rng.random(3), BITS)
        z = x
        for _ in range(7):
            z = step(sys, z)
        assert iterate(sys, x, 7).coords == z.coords

    @pytest.mark.parametrize("kind,dim", [("rotation1d", 1), ("rotationd", 2),
                                          ("skew", 3)])
    def test_closed_form_equals_composition(self, kind, dim, golden, sqrt2m1, rng):
        if kind == "rotation1d":
            sys = SystemSpec.rotation(golden, BITS)
        elif kind == "rotationd":
            sys = SystemSpec.rotation_d([golden, sqrt2m1], BITS)
        else:
            sys = SystemSpec.skew(dim, golden, BITS)
        for _ in range(20):
            x = TorusPoint.from_floats(rng.random(dim), BITS)
            z = x
            for j in range(1, 101):
                z = step(sys, z)
                assert iterate(sys, x, j).coords == z.coords


class TestBirkhoffSum:
    def test_single_step(self, rot):
        phi = make_cos()
        x = TorusPoint.from_floats([0.2], BITS)
        assert birkhoff_sum(rot, phi, x, 1) == pytest.approx(
            math.cos(2 * math.pi * 0.2), abs=1e-12)

    def test_constant(self, rot):
        phi = Observable(dim=1, fn=lambda x: np.full(np.shape(x), 2.0),
                         modulus=Holder(1.0), norm_est=2.0, mean_hint=2.0)
        assert birkhoff_sum(rot, phi, TorusPoint.zero(1, BITS), 500) == \
            pytest.approx(1000.0, abs=1e-9)

    def test_against_mpmath_oracle(self, rot):
        mpmath.mp.dps = 80
        w = (mpmath.sqrt(5) - 1) / 2
        acc = mpmath.mpf(0)
        for j in range(1000):
            acc += mpmath.cos(2 * mpmath.pi * mpmath.frac(j * w))
        got = birkhoff_sum(rot, make_cos(), TorusPoint.zero(1, BITS), 1000)
        assert got == pytest.approx(float(acc), abs=1e-10)

    def test_additivity(self, rot, rng):
        phi = make_dist_pow(0.5)
        x = TorusPoint.from_floats([rng.random()], BITS)
        N, M = 700, 300
        whole = birkhoff_sum(rot, phi, x, N + M)
        part = birkhoff_sum(rot, phi, x, N) + \
            birkhoff_sum(rot, phi, iterate(rot, x, N), M)
        assert whole == pytest.approx(part, rel=1e-10)


class TestExpSum:
    def test_integer_t(self):
        assert exp_sum_avg(3.0, 7) == 1.0 + 0.0j

    def test_half(self):
        assert abs(exp_sum_avg(0.5, 2)) < 1e-15

    def test_closed_vs_direct(self, rng):
        for t in rng.random(20):
            for N in (3, 100, 1000):
                d = abs(exp_sum_avg(t, N) - exp_sum_direct(t, N))
                assert d < 1e-10

    def test_fp_variant_matches(self, golden):
        w = golden.fixed_point(BITS)
        for k in (1, 5, 89):
            a = exp_sum_avg_fp((k * w) % ONE, BITS, 500)
            b = exp_sum_direct(k * golden.float_value(), 500)
            assert abs(a - b) < 1e-9

    @given(st.floats(1e-6, 0.999999), st.integers(1, 10 ** 5))
    @settings(max_examples=200, deadline=None)
    def test_bounds(self, t, N):
        v = abs(exp_sum_avg(t, N))
        assert v <= 1.0
        norm_t = min(t, 1 - t)
        if norm_t >= 1e-6:
            # |1 - e(t)| >= 4 ||t|| makes |E_N| * N * ||t|| <= 1 sharp
            assert v * N * norm_t <= 1.0 + 1e-9


class TestKernelSum:
    def test_q2_single_pair(self, golden):
        f = Frequency(PartialQuotients((), "const", (2,)))  # sqrt2 - 1
        cf = expand_cf(f, max_q=100)
        res = kernel_sum(f, cf, 1, 50)  # q_1 = 2
        expect = 2 * abs(exp_sum_avg_fp(f.fixed_point(BITS), BITS, 50))
        assert res.total == pytest.approx(expect, abs=1e-12)

    def test_golden_q89_ratio(self, golden, golden_cf):
        idx = list(golden_cf.q).index(89) + 1
        res = kernel_sum(golden, golden_cf, idx, 10 ** 4)
        assert res.ratio <= 8.0

    def test_ratio_sweep_bounded(self, golden, golden_cf):
        ratios = []
        for idx in range(1, golden_cf.certified_len + 1):
            q = golden_cf.q_at(idx)
            if q < 13 or q > 6765:
                continue
            ratios.append(kernel_sum(golden, golden_cf, idx, 10 ** 5).ratio)
        assert ratios and max(ratios) <= 10.0
        assert min(ratios) > 0
        assert max(ratios) / min(ratios) < 50  # spread recorded and finite


class TestThreeGapStructure:
    @pytest.mark.parametrize("freq_name", ["golden", "sqrt2"])
    def test_arc_occupancy(self, freq_name, golden, sqrt2m1):
        omega = golden if freq_name == "golden" else sqrt2m1
        cf = expand_cf(omega, max_q=1000)
        w = omega.fixed_point(BITS)
        for n in range(1, cf.certified_len + 1):
            q = cf.q_at(n)
            if q < 2 or q > 1000:
                continue
            # arcs [j/2q, (j+1)/2q): each holds at most one of k*omega,
            # 1 <= k < q, and the two arcs flanking 0 hold none
            seen = set()
            t = 0
            for k in range(1, q):
                t = (t + w) % ONE
                arc = (t * 2 * q) >> BITS
                assert arc not in seen
                seen.add(arc)
                assert arc not in (0, 2 * q - 1)


class TestSupDeviation:
    def test_zero_observable(self, rot):
        phi = Observable(dim=1, fn=lambda x: np.zeros(np.shape(x)),
                         modulus=Holder(1.0), norm_est=0.0, mean_hint=0.0)
        assert sup_deviation(rot, phi, 100, 64).sup_dev == 0.0

    def test_coboundary_rate(self, rot, golden):
        phi = make_coboundary(golden.float_value())
        for N in (100, 1000):
            res = sup_deviation(rot, phi, N, 128)
            assert res.sup_dev <= 2.0 / N + 1e-12

    def test_denjoy_koksma_at_convergents(self, rot, golden, golden_cf):
        phi = make_dist_pow(0.5)
        norm = 1.0 + 0.5 ** 0.5
        for q in golden_cf.q:
            if q > 1000:
                break
            res = sup_deviation(rot, phi, int(q), 1024)
            assert res.sup_dev * q ** 0.5 <= norm

    def test_bounded_by_two_sup(self, rot):
        phi = make_cos()
        res = sup_deviation(rot, phi, 37, 64)
        assert res.sup_dev <= 2.0 * 1.0

    def test_n1_equals_grid_max(self, rot):
        phi = make_dist_pow(0.5)
        res = sup_deviation(rot, phi, 1, 256)
        xs = np.arange(256) / 256
        expect = np.max(np.abs(phi.fn(xs) - phi.mean_hint))
        assert res.sup_dev == pytest.approx(expect, abs=1e-12)

    def test_grid_budget(self, golden, sqrt2m1):
        sys = SystemSpec.rotation_d([golden, sqrt2m1, golden], BITS)
        phi = Observable(dim=3, fn=lambda x: x[..., 0] * 0.0,
                         modulus=Holder(1.0), norm_est=0.0, mean_hint=0.0)
        with pytest.raises(DimensionTooLarge):
            sup_deviation(sys, phi, 10, 1024)

    def test_skew_small_grid_runs(self, golden):
        sys = SystemSpec.skew(2, golden, BITS)
        phi = Observable(
            dim=2, fn=lambda x: np.cos(2 * np.pi * np.asarray(x)[..., 0]),
            modulus=Holder(1.0), norm_est=1 + 2 * np.pi, mean_hint=0.0)
        res = sup_deviation(sys, phi, 50, 16)
        assert 0 <= res.sup_dev <= 2.0


class TestCharSums:
    def test_pure_last_axis_is_geometric(self, golden, rng):
        d = 2
        x = TorusPoint.from_floats(rng.random(d), BITS)
        k = (0, 3)
        N = 200
        res = char_birkhoff_skew(d, golden, k, x, N, BITS)
        wv = golden.float_value()
        expect = abs((1 - cmath.exp(2j * math.pi * N * 3 * wv))
                     / (1 - cmath.exp(2j * math.pi * 3 * wv)))
        assert abs(res.value) == pytest.approx(expect, abs=1e-6)
        assert res.degree == 1
        assert (res.leading_num, res.leading_den) == (3, 1)

    def test_n1(self, golden, rng):
        x = TorusPoint.from_floats(rng.random(2), BITS)
        res = char_birkhoff_skew(2, golden, (1, 2), x, 1, BITS)
        f = x.to_floats()
        assert res.value == pytest.approx(
            cmath.exp(2j * math.pi * (f[0] + 2 * f[1])), abs=1e-12)

    @pytest.mark.parametrize("d,k", [(2, (1, 0)), (3, (2, -1, 1)), (4, (0, 1, 0, 2))])
    def test_matches_composition_oracle(self, d, k, golden, rng):
        sys = SystemSpec.skew(d, golden, BITS)
        x = TorusPoint.from_floats(rng.random(d), BITS)
        N = 300
        res = char_birkhoff_skew(d, golden, k, x, N, BITS)
        acc = 0.0 + 0.0j
        z = x
        kv = np.array(k, dtype=float)
        for _ in range(N):
            acc += cmath.exp(2j * math.pi * float(kv @ z.to_floats()))
            z = step(sys, z)
        assert abs(res.value - acc) < 1e-9

    def test_degree_classification(self, golden, rng):
        x = TorusPoint.from_floats(rng.random(4), BITS)
        res = char_birkhoff_skew(4, golden, (0, 2, 0, 1), x, 10, BITS)
        assert res.degree == 3
        assert (res.leading_num, res.leading_den) == (2, math.factorial(3))
