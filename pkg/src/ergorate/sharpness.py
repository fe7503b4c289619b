"""Lacunary-series observables witnessing that the rate bounds are sharp.

The witness is phi(x) = Re sum_k w_k e(q_k x) with modes at the convergent
denominators q_k of the driving frequency and decreasing weights w_k
(Holder q_k^-alpha, a general modulus w(1/q_k), or analytic e^-q_k).  The
infinite series is replaced by a truncation whose tail is provably below a
tolerance that sits far under every asserted lower bound.

Because mode frequencies reach 1e25 and beyond, all mode phases are reduced
mod 1 in integer fixed point before any trigonometric evaluation; double
precision on the raw product q_k * x would be garbage past q_k ~ 1e15.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arithmetic import ContinuedFraction, Frequency
from .dynamics import TorusPoint, exp_sum_avg_fp
from .errors import HypothesisNotMet, Uncertified
from .kernels import Holder, ModulusOfContinuity, Observable

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HolderWeight:
    alpha: float

    def __call__(self, q: int) -> float:
        return float(q) ** -self.alpha if q < 10 ** 300 else 0.0

    def describe(self) -> str:
        return f"holder:{self.alpha}"


@dataclass(frozen=True)
class ModulusWeight:
    modulus: ModulusOfContinuity

    def __call__(self, q: int) -> float:
        return self.modulus(1.0 / q) if q < 10 ** 300 else 0.0

    def describe(self) -> str:
        return f"modulus:{self.modulus.describe()}"


@dataclass(frozen=True)
class AnalyticWeight:
    def __call__(self, q: int) -> float:
        return math.exp(-q) if q < 700 else 0.0

    def describe(self) -> str:
        return "analytic"


def _tail_bound(weight, q_next: int, q_next2: Optional[int]) -> float:
    """Rigorous bound on sum_{k > L} w(q_k) from q_{L+1}, q_{L+2} and the
    doubling law q_{k+2} >= 2 q_k; raises if the chain does not converge."""
    total = 0.0
    for q0 in (q_next, q_next2 or 2 * q_next):
        q = q0
        for j in range(400):
            t = weight(q)
            total += t
            if t < 1e-30:
                break
            q *= 2
        else:
            raise Uncertified("weight tail does not converge fast enough")
    return total


# ---------------------------------------------------------------------------
# the observable
# ---------------------------------------------------------------------------


@dataclass
class LacunaryObservable(Observable):
    """Truncated lacunary cosine series on the convergent denominators."""

    cf: ContinuedFraction = None
    qs: tuple = ()
    weights: tuple = ()
    tail_bound: float = 0.0
    bits: int = 192

    @property
    def n_modes(self) -> int:
        return len(self.qs)

    def mode_weight(self, m: int) -> float:
        return self.weights[m - 1]

    def mode_q(self, m: int) -> int:
        return self.qs[m - 1]

    def phases_at(self, x: TorusPoint) -> list:
        """Exact fixed-point phases q_k * x mod 1, one per mode."""
        one = 1 << self.bits
        c = x.coords[0]
        return [(q * c) % one for q in self.qs]

    def eval_point(self, x: TorusPoint) -> float:
        one = 1 << self.bits
        return float(sum(
            w * math.cos(TWO_PI * (ph / one))
            for w, ph in zip(self.weights, self.phases_at(x))
        ))


def _lacunary_fn(qs, weights, bits):
    one = 1 << bits

    def fn(x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        flat = xs.reshape(-1)
        out = np.zeros(flat.shape)
        for q, w in zip(qs, weights):
            # exact mod-1 reduction of q * x through fixed point
            phases = np.array(
                [((q * int(round((v % 1.0) * one))) % one) / one for v in flat]
            )
            out += w * np.cos(TWO_PI * phases)
        out = out.reshape(xs.shape)
        return out if np.ndim(x) else float(out[0])

    return fn


def build_lacunary(cf: ContinuedFraction, weight, tol: float = 1e-12,
                   bits: int = 192) -> LacunaryObservable:
    """Truncate the series so the dropped tail is provably below tol.

    The certified prefix must reach far enough for the doubling-law tail
    bound; raises Uncertified otherwise.
    """
    L = cf.certified_len
    if L < 3:
        raise Uncertified("need at least three certified convergents")
    ws = [weight(cf.q_at(k)) for k in range(1, L + 1)]
    if cf.terminated:
        beyond = 0.0
    else:
        # q_{L+1} >= q_L + q_{L-1} and q_{L+2} >= 2 q_L seed the two doubling
        # chains that dominate the uncomputed tail
        beyond = _tail_bound(weight, cf.q_at(L) + cf.q_at(L - 1), 2 * cf.q_at(L))
    if beyond > tol:
        raise Uncertified(f"certified prefix cannot meet tail tolerance {tol}")
    # smallest K with sum_{k>K} w_k (+ beyond-prefix bound) <= tol
    suffix = beyond
    K = L
    while K > 1 and suffix + ws[K - 1] <= tol:
        suffix += ws[K - 1]
        K -= 1
    qs = tuple(cf.q_at(k) for k in range(1, K + 1))
    weights = tuple(ws[:K])
    total_tail = sum(ws[K:]) + beyond

    alpha = weight.alpha if isinstance(weight, HolderWeight) else None
    modulus = Holder(alpha) if alpha else (
        weight.modulus if isinstance(weight, ModulusWeight) else Holder(1.0)
    )
    # rigorous seminorm bound: |phi(x+h)-phi(x)| <= sum w_k min(2, 2 pi q_k h)
    semi = 0.0
    for j in range(2, 60):
        h = 2.0 ** -j
        bound = sum(w * min(2.0, TWO_PI * float(min(q, 10 ** 200)) * h)
                    for q, w in zip(qs, weights))
        semi = max(semi, bound / modulus(h))
    obs = LacunaryObservable(
        dim=1,
        fn=_lacunary_fn(qs, weights, bits),
        modulus=modulus,
        norm_est=float(sum(weights)) + semi,
        mean_hint=0.0,
        name=f"lacunary:{weight.describe()}",
        cf=cf,
        qs=qs,
        weights=weights,
        tail_bound=total_tail,
        bits=bits,
    )
    return obs


# ---------------------------------------------------------------------------
# measurement routes
# ---------------------------------------------------------------------------


def measure_average(phi: LacunaryObservable, omega: Frequency, x: TorusPoint,
                    N: int, chunk: int = 1 << 20) -> float:
    """(1/N) S_N phi(x) by direct trigonometric summation along the orbit.

    Per mode, the initial phase and the per-step increment are reduced mod 1
    exactly in fixed point; the j-sweep then runs vectorized in doubles
    (error ~ N * 2^-53 per mode, irrelevant at the N this route serves).
    """
    one = 1 << phi.bits
    w_fp = omega.fixed_point(phi.bits)
    total = 0.0
    for q, w in zip(phi.qs, phi.weights):
        if w == 0.0:
            continue
        step = (q * w_fp) % one
        ph0 = (q * x.coords[0]) % one
        step_f, ph0_f = step / one, ph0 / one
        mode_sum = 0.0
        for lo in range(0, N, chunk):
            hi = min(N, lo + chunk)
            js = np.arange(lo, hi, dtype=float)
            mode_sum += float(np.sum(np.cos(TWO_PI * np.mod(ph0_f + js * step_f, 1.0))))
        total += w * mode_sum
    return total / N


def closed_form_average(phi: LacunaryObservable, omega: Frequency,
                        x: TorusPoint, N: int) -> float:
    """Same average via the geometric closed form of each mode's sum."""
    one = 1 << phi.bits
    w_fp = omega.fixed_point(phi.bits)
    total = 0.0
    for q, w in zip(phi.qs, phi.weights):
        if w == 0.0:
            continue
        t_fp = (q * w_fp) % one
        ph = ((q * x.coords[0]) % one) / one
        e = exp_sum_avg_fp(t_fp, phi.bits, N)
        total += w * (e * np.exp(2j * math.pi * ph)).real
    return total


# ---------------------------------------------------------------------------
# decomposition and lower bounds
# ---------------------------------------------------------------------------


@dataclass
class SharpnessReport:
    m: int
    q_m: int
    q_m1: int
    sigma_m: float
    sigma_gt: float
    sigma_lt: float
    lower_dev: float        # measured (1/q_m) S_{q_m} phi(x) - mean
    identity_gap: float     # |sigma_m + sigma_gt + sigma_lt - lower_dev|
    N_m: Optional[int] = None
    lower_dev_Nm: Optional[float] = None


def decompose(phi: LacunaryObservable, m: int, x: TorusPoint,
              omega: Optional[Frequency] = None) -> SharpnessReport:
    """Split (1/q_m) S_{q_m} phi(x) - mean into the resonant mode m, the
    higher modes and the lower modes; the three parts are closed-form
    geometric sums, and their total must reproduce the directly measured
    deviation exactly (up to roundoff) for the truncated series.
    """
    if not 1 <= m <= phi.n_modes:
        raise ValueError(f"mode index m={m} outside 1..{phi.n_modes}")
    omega = omega or phi.cf.omega
    one = 1 << phi.bits
    w_fp = omega.fixed_point(phi.bits)
    qm = phi.mode_q(m)

    def term(k: int) -> float:
        q, w = phi.mode_q(k), phi.mode_weight(k)
        t_fp = (q * w_fp) % one
        ph = ((q * x.coords[0]) % one) / one
        e = exp_sum_avg_fp(t_fp, phi.bits, qm)
        return w * (e * np.exp(2j * math.pi * ph)).real

    sigma_m = term(m)
    sigma_gt = sum(term(k) for k in range(m + 1, phi.n_modes + 1))
    sigma_lt = sum(term(k) for k in range(1, m))
    measured = measure_average(phi, omega, x, qm)
    return SharpnessReport(
        m=m,
        q_m=qm,
        q_m1=phi.cf.q_at(m + 1) if m + 1 <= phi.cf.certified_len else 0,
        sigma_m=sigma_m,
        sigma_gt=sigma_gt,
        sigma_lt=sigma_lt,
        lower_dev=measured,
        identity_gap=abs(sigma_m + sigma_gt + sigma_lt - measured),
    )


@dataclass
class LowerBoundResult:
    m: int
    q_m: int
    q_m1: int
    entries: list           # (l, lower_dev)
    min_ratio: float        # min over l of lower_dev / w_m
    l_bar: int              # largest l with every window up to it positive
    hypothesis_ok: bool


def start_points(phi: LacunaryObservable, omega: Frequency, m: int,
                 ls: Sequence[int]) -> list:
    one = 1 << phi.bits
    w_fp = omega.fixed_point(phi.bits)
    qm = phi.mode_q(m)
    return [TorusPoint(((l * qm * w_fp) % one,), phi.bits) for l in ls]


def verify_lower_bound(phi: LacunaryObservable, m: int,
                       l_values: Optional[Sequence[int]] = None,
                       gap_constant: float = 10.0,
                       range_constant: float = 0.125,
                       l_cap: int = 256,
                       omega: Optional[Frequency] = None) -> LowerBoundResult:
    """Measure the q_m-step averages at x = l q_m omega across the admitted
    range of l and check they stay positive (the resonant mode dominates).

    Requires the gap q_{m+1} >= gap_constant * m * q_m; raises
    HypothesisNotMet otherwise so harnesses can report instead of assert.
    """
    omega = omega or phi.cf.omega
    qm = phi.mode_q(m)
    if m + 1 > phi.cf.certified_len:
        raise Uncertified(f"q_{m + 1} not certified")
    qm1 = phi.cf.q_at(m + 1)
    if qm1 < gap_constant * m * qm:
        raise HypothesisNotMet(
            f"q_{m + 1}={qm1} < {gap_constant} * {m} * q_{m}={qm}"
        )
    if l_values is None:
        l_max = min(int(range_constant * qm1 / qm), l_cap)
        l_values = range(0, l_max + 1)
    ls = list(l_values)
    w_m = phi.mode_weight(m)
    entries = []
    min_ratio = math.inf
    l_bar = -1
    prefix_positive = True
    for l, x in zip(ls, start_points(phi, omega, m, ls)):
        dev = measure_average(phi, omega, x, qm)
        entries.append((l, dev))
        min_ratio = min(min_ratio, dev / w_m)
        if prefix_positive and dev > 0:
            l_bar = l
        else:
            prefix_positive = False
    return LowerBoundResult(
        m=m, q_m=qm, q_m1=qm1, entries=entries, min_ratio=min_ratio,
        l_bar=l_bar, hypothesis_ok=True,
    )


@dataclass
class NmBoundResult:
    m: int
    q_m: int
    N_m: int
    lower_dev_Nm: float
    ratio: float            # lower_dev_Nm / w_m


def verify_Nm_bound(phi: LacunaryObservable, m: int,
                    lower: Optional[LowerBoundResult] = None,
                    ratio_floor: float = 0.1,
                    omega: Optional[Frequency] = None,
                    **kwargs) -> NmBoundResult:
    """Aggregate the passing windows: N_m = (l_bar + 1) q_m and the measured
    N_m-step average at 0 must clear ratio_floor * w_m."""
    omega = omega or phi.cf.omega
    if lower is None:
        lower = verify_lower_bound(phi, m, omega=omega, **kwargs)
    if lower.l_bar < 0:
        raise HypothesisNotMet(f"no positive window at m={m}")
    N_m = (lower.l_bar + 1) * lower.q_m
    dev = measure_average(phi, omega, TorusPoint.zero(1, phi.bits), N_m)
    return NmBoundResult(
        m=m, q_m=lower.q_m, N_m=N_m, lower_dev_Nm=dev,
        ratio=dev / phi.mode_weight(m),
    )


def slow_rate_point(phi: LacunaryObservable, m: int,
                    range_constant: float = 0.125, l_cap: int = 64,
                    omega: Optional[Frequency] = None) -> NmBoundResult:
    """The Liouville slow-rate measurement: N_m ~ q_{m+1} built from the
    admitted window count (capped for tractability when q_{m+1}/q_m is
    astronomically large), no gap-hypothesis gate."""
    omega = omega or phi.cf.omega
    qm = phi.mode_q(m)
    if m + 1 > phi.cf.certified_len:
        raise Uncertified(f"q_{m + 1} not certified")
    qm1 = phi.cf.q_at(m + 1)
    l_bar = max(0, min(int(range_constant * qm1 / qm), l_cap))
    N_m = (l_bar + 1) * qm
    dev = measure_average(phi, omega, TorusPoint.zero(1, phi.bits), N_m)
    return NmBoundResult(
        m=m, q_m=qm, N_m=N_m, lower_dev_Nm=dev, ratio=dev / phi.mode_weight(m),
    )


def borel_bernstein_schedule(cf: ContinuedFraction, constant: float = 1.0) -> tuple:
    """Indices m with a_{m+1} >= constant * m: where the gap law holds."""
    if cf.certified_len == 0:
        raise Uncertified("empty certified prefix")
    return tuple(
        m for m in range(1, cf.certified_len)
        if cf.a_at(m + 1) >= constant * m
    )
