"""Continued fractions, best rational approximations and frequency arithmetic.

Frequencies are irrational (or rational, for tests) numbers in (0, 1) with an
exact or high-precision representation.  Everything downstream (orbits,
exponential sums, lacunary series) consumes two products of this module:

* certified continued-fraction data ``a_n, p_n, q_n`` with the usual
  recurrences ``p_{n+1} = a_{n+1} p_n + p_{n-1}``,
  ``q_{n+1} = a_{n+1} q_n + q_{n-1}`` (``p_0 = 0, q_0 = 1``), and
* a round-to-nearest fixed-point value ``round(omega * 2**bits)`` whose
  rounding is certified from an exact enclosing interval.

Double precision corrupts ``||k*omega||`` once q grows past ~1e7, hence the
integer fixed-point discipline everywhere.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Optional, Sequence

from .errors import NotIrrational, PrecisionExhausted, Uncertified

DEFAULT_BITS = 192

# Generators stop once denominators pass this size; far beyond any precision
# or tail-tolerance requirement we ever certify against.
_Q_CEILING = 10 ** 1600


def dist_to_Z(t: float) -> float:
    """Distance from t to the nearest integer, in [0, 1/2]."""
    f = t - math.floor(t)
    return min(f, 1.0 - f)


def fp_reduce(value: int, bits: int) -> int:
    """Reduce an integer fixed-point value mod 1 (i.e. mod 2**bits)."""
    return value & ((1 << bits) - 1)


def fp_dist_to_Z(value: int, bits: int) -> float:
    """``||value / 2**bits||`` computed from the exact integer numerator."""
    one = 1 << bits
    v = value & (one - 1)
    return min(v, one - v) / one


def fp_signed(value: int, bits: int) -> int:
    """Signed representative of value mod 2**bits in (-2**(bits-1), 2**(bits-1)]."""
    one = 1 << bits
    v = value & (one - 1)
    return v - one if v > one >> 1 else v


def _round_div(num: int, den: int) -> int:
    """round(num / den) for den > 0, ties away from zero (never hit here)."""
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


# ---------------------------------------------------------------------------
# partial-quotient rules
# ---------------------------------------------------------------------------

# A rule maps (m, q_hist) -> a_m or None (sequence ends / leaves the storable
# range).  q_hist holds [q_0, q_1, ..., q_{m-1}].  Rules live in a registry so
# Frequency stays hashable and serializable.
_RULES: dict[str, Callable[..., Optional[int]]] = {}


def register_rule(name: str, fn: Callable[..., Optional[int]]) -> None:
    _RULES[name] = fn


def _rule_const(m, q_hist, c):
    return int(c)


def _rule_index(m, q_hist):
    # a_m = m
    return m


def _rule_square_even(m, q_hist):
    # a_m = m^2 at even indices, 1 at odd ones
    return m * m if m % 2 == 0 else 1


def _rule_double_exp(m, q_hist):
    # a_m = 2^(2^m); stops once denominators leave the storable range
    if q_hist[-1] > 10 ** 400 or m > 40:
        return None
    return 1 << (1 << m)


def _rule_spike(m, q_hist, m0, height):
    # a_{m0} large, every other partial quotient 1
    return int(height) if m == int(m0) else 1


def _rule_exp_gap(m, q_hist, m0):
    """All-ones ramp through m0, then q_m ~ exp(q_{m-1}).

    The un-ramped rule q_2 ~ e, q_3 ~ e^e, ... explodes past any storable or
    measurable scale by its third term, so a short ramp keeps the first
    tested indices in range while the gap condition q_{m+1} ~ e^{q_m} holds
    exactly where the slow-rate scenarios probe it.
    """
    if m <= int(m0):
        return 1
    q_prev = q_hist[-1]
    q_prev2 = q_hist[-2] if len(q_hist) >= 2 else 0
    if q_prev > 4000:
        return None  # e^{q_prev} would not be storable
    import mpmath

    with mpmath.workdps(int(q_prev / math.log(10)) + 30):
        target = int(mpmath.nint(mpmath.e ** q_prev))
    a = _round_div(target - q_prev2, q_prev)
    return max(1, a)


register_rule("const", _rule_const)
register_rule("index", _rule_index)
register_rule("square_even", _rule_square_even)
register_rule("double_exp", _rule_double_exp)
register_rule("spike", _rule_spike)
register_rule("exp_gap", _rule_exp_gap)


# ---------------------------------------------------------------------------
# frequency representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticSurd:
    """(p + q*sqrt(d)) / r with d a positive non-square integer."""

    p: int
    q: int
    d: int
    r: int

    def __post_init__(self):
        if self.d <= 0 or isqrt(self.d) ** 2 == self.d:
            raise ValueError("d must be a positive non-square integer")
        if self.r == 0:
            raise ValueError("r must be nonzero")

    def normalized(self) -> "QuadraticSurd":
        """Equivalent surd with q > 0 (r keeps whatever sign results)."""
        p, q, d, r = self.p, self.q, self.d, self.r
        if q == 0:
            raise ValueError("rational disguised as a surd")
        if q < 0:
            p, q, r = -p, -q, -r
        return QuadraticSurd(p, q, d, r)


def _surd_enclosure(p: int, q: int, d: int, r: int, guard_bits: int):
    """Exact rational interval [lo, hi] containing (p + q*sqrt(d)) / r, q > 0."""
    k = guard_bits
    s = isqrt(d << (2 * k))  # s <= sqrt(d) * 2^k < s + 1
    a = Fraction(p * (1 << k) + q * s, r * (1 << k))
    b = Fraction(p * (1 << k) + q * (s + 1), r * (1 << k))
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class PartialQuotients:
    """Explicit prefix of partial quotients, optionally extended by a rule."""

    terms: tuple = ()
    rule: Optional[str] = None
    rule_params: tuple = ()

    def __post_init__(self):
        if not self.terms and self.rule is None:
            raise ValueError("need at least one term or a rule")
        if any(int(a) < 1 for a in self.terms):
            raise ValueError("partial quotients must be >= 1")
        if self.rule is not None and self.rule not in _RULES:
            raise ValueError(f"unknown rule {self.rule!r}")

    def term(self, m: int, q_hist: Sequence[int]) -> Optional[int]:
        """a_m (1-based) or None when the sequence ends."""
        if m <= len(self.terms):
            return int(self.terms[m - 1])
        if self.rule is None:
            return None
        return _RULES[self.rule](m, list(q_hist), *self.rule_params)


@dataclass(frozen=True)
class DecimalString:
    """A frequency given by >= min_digits certified decimal digits."""

    digits: str
    min_digits: int = 80

    def __post_init__(self):
        if not re.fullmatch(r"0?\.\d+", self.digits):
            raise ValueError("expected a decimal string like '0.6180...'")
        frac = self.digits.split(".")[1]
        significant = len(frac.lstrip("0"))
        if significant < self.min_digits:
            raise ValueError(
                f"need >= {self.min_digits} significant digits, got {significant}"
            )

    def interval(self):
        """[lo, hi] containing the true value (digits correct to half an ulp)."""
        frac = self.digits.split(".")[1]
        v = Fraction(int(frac), 10 ** len(frac))
        u = Fraction(1, 2 * 10 ** len(frac))
        return v - u, v + u


@dataclass(frozen=True)
class Frequency:
    """A frequency in (0, 1) plus its fixed-point precision budget."""

    rep: object
    fractional_bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.fractional_bits < 64:
            raise ValueError("fractional_bits must be >= 64")
        lo, hi = self._interval_quick()
        if lo <= 0 or hi >= 1:
            raise ValueError("frequency must lie strictly inside (0, 1)")

    # -- interval machinery ------------------------------------------------

    def _interval_quick(self):
        """A (possibly loose) rational enclosure, for validation."""
        rep = self.rep
        if isinstance(rep, QuadraticSurd):
            s = rep.normalized()
            return _surd_enclosure(s.p, s.q, s.d, s.r, 64)
        if isinstance(rep, DecimalString):
            return rep.interval()
        cf = expand_cf(self, max_q=10 ** 6)
        return _cf_enclosure(cf)

    def interval(self, bits: Optional[int] = None):
        """Rational enclosure tight enough to certify `bits` of fixed point."""
        bits = bits or self.fractional_bits
        rep = self.rep
        if isinstance(rep, QuadraticSurd):
            s = rep.normalized()
            return _surd_enclosure(s.p, s.q, s.d, s.r, bits + 64)
        if isinstance(rep, DecimalString):
            return rep.interval()
        # partial quotients: consecutive convergents bracket the value
        target = 1 << (bits + 4)
        cf = expand_cf(self, max_q=None, stop_product=target)
        return _cf_enclosure(cf)

    # -- derived values -----------------------------------------------------

    def fixed_point(self, bits: Optional[int] = None) -> int:
        """round(value * 2**bits), certified from the exact enclosure."""
        bits = bits or self.fractional_bits
        cached = _fp_cache.get((self, bits))
        if cached is not None:
            return cached
        lo, hi = self.interval(bits)
        n_lo = _round_div(lo.numerator << bits, lo.denominator)
        n_hi = _round_div(hi.numerator << bits, hi.denominator)
        if n_lo != n_hi:
            if isinstance(self.rep, DecimalString):
                raise PrecisionExhausted(
                    f"decimal digits cannot certify {bits} fractional bits"
                )
            # widen the surd guard until the rounding is determined
            if isinstance(self.rep, QuadraticSurd):
                s = self.rep.normalized()
                g = bits + 64
                while n_lo != n_hi and g < bits + 1024:
                    g *= 2
                    lo, hi = _surd_enclosure(s.p, s.q, s.d, s.r, g)
                    n_lo = _round_div(lo.numerator << bits, lo.denominator)
                    n_hi = _round_div(hi.numerator << bits, hi.denominator)
            if n_lo != n_hi:
                raise PrecisionExhausted("cannot certify fixed-point rounding")
        _fp_cache[(self, bits)] = n_lo
        return n_lo

    def float_value(self) -> float:
        return self.fixed_point(64) / 2.0 ** 64

    def is_rational(self) -> bool:
        rep = self.rep
        return isinstance(rep, PartialQuotients) and rep.rule is None

    def scale(self, num: int, den: int) -> "Frequency":
        """Exact (num/den) * omega mod 1; only surd representations scale exactly."""
        if num == 0:
            raise ValueError("zero multiple is not a frequency")
        if not isinstance(self.rep, QuadraticSurd):
            raise ValueError("exact scaling requires a quadratic-surd representation")
        s = self.rep.normalized()
        p, q, r = s.p * num, s.q * num, s.r * den
        if q < 0:
            p, q, r = -p, -q, -r
        # reduce mod 1 by subtracting floor((p + q sqrt(d)) / r)
        fl = _exact_floor_surd(p, q * q * s.d, r)
        return Frequency(QuadraticSurd(p - fl * r, q, s.d, r), self.fractional_bits)

    # -- parsing -------------------------------------------------------------

    @staticmethod
    def parse(text: str, fractional_bits: int = DEFAULT_BITS) -> "Frequency":
        """Parse "surd:(p,q,d,r)", "pq:[a1,a2,...]", "pq:rule:name(:p1,p2)",
        "dec:<digits>", or a named shortcut (golden, sqrt2m1, sqrt3m1)."""
        text = text.strip()
        named = {
            "golden": "surd:(-1,1,5,2)",
            "sqrt2m1": "surd:(-1,1,2,1)",
            "sqrt3m1": "surd:(-1,1,3,1)",
        }
        text = named.get(text, text)
        if text.startswith("surd:"):
            body = text[5:].strip().lstrip("(").rstrip(")")
            p, q, d, r = (int(x) for x in body.split(","))
            return Frequency(QuadraticSurd(p, q, d, r), fractional_bits)
        if text.startswith("pq:rule:"):
            body = text[8:]
            if ":" in body:
                name, params = body.split(":", 1)
                params = tuple(int(x) for x in params.split(","))
            else:
                name, params = body, ()
            return Frequency(PartialQuotients((), name, params), fractional_bits)
        if text.startswith("pq:"):
            body = text[3:].strip().lstrip("[").rstrip("]")
            terms = tuple(int(x) for x in body.split(","))
            return Frequency(PartialQuotients(terms), fractional_bits)
        if text.startswith("dec:"):
            return Frequency(DecimalString(text[4:]), fractional_bits)
        raise ValueError(f"cannot parse frequency {text!r}")


_fp_cache: dict = {}


def golden_mean(bits: int = DEFAULT_BITS) -> Frequency:
    """(sqrt(5) - 1) / 2, the all-ones continued fraction."""
    return Frequency(QuadraticSurd(-1, 1, 5, 2), bits)


def sqrt2_minus_1(bits: int = DEFAULT_BITS) -> Frequency:
    return Frequency(QuadraticSurd(-1, 1, 2, 1), bits)


def sqrt3_minus_1(bits: int = DEFAULT_BITS) -> Frequency:
    return Frequency(QuadraticSurd(-1, 1, 3, 1), bits)


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuedFraction:
    """Certified prefix a_1..a_M with convergents p_1..p_M / q_1..q_M."""

    omega: Optional[Frequency]
    a: tuple
    p: tuple
    q: tuple
    certified_len: int
    terminated: bool = False
    max_q_searched: Optional[int] = None  # denominators <= this are all present

    def __len__(self) -> int:
        return len(self.a)

    def a_at(self, n: int) -> int:
        if not 1 <= n <= len(self.a):
            raise Uncertified(f"a_{n} outside stored range 1..{len(self.a)}")
        return self.a[n - 1]

    def p_at(self, n: int) -> int:
        if n == 0:
            return 0
        if n > len(self.p):
            raise Uncertified(f"p_{n} outside stored range")
        return self.p[n - 1]

    def q_at(self, n: int) -> int:
        if n == 0:
            return 1
        if n > len(self.q):
            raise Uncertified(f"q_{n} outside stored range")
        return self.q[n - 1]

    def to_json(self) -> str:
        return json.dumps(
            {"a": list(self.a), "p": list(self.p), "q": list(self.q),
             "certified_len": self.certified_len}
        )

    @staticmethod
    def from_json(text: str, omega: Optional[Frequency] = None) -> "ContinuedFraction":
        obj = json.loads(text)
        return ContinuedFraction(
            omega=omega,
            a=tuple(obj["a"]),
            p=tuple(obj["p"]),
            q=tuple(obj["q"]),
            certified_len=int(obj["certified_len"]),
        )


def _cf_enclosure(cf: ContinuedFraction):
    """Bracket omega between its last two convergents (or pin it exactly)."""
    n = len(cf.q)
    if cf.terminated or n < 2:
        if cf.terminated:
            v = Fraction(cf.p[-1], cf.q[-1])
            return v, v
        raise Uncertified("not enough convergents to enclose the value")
    x = Fraction(cf.p[-2], cf.q[-2])
    y = Fraction(cf.p[-1], cf.q[-1])
    return (x, y) if x < y else (y, x)


def _lt_sqrt(c: int, D: int) -> bool:
    """c < sqrt(D) for integer c, positive non-square D."""
    return c < 0 or c * c < D


def _exact_floor_surd(P: int, D: int, Q: int) -> int:
    """floor((P + sqrt(D)) / Q) by integer arithmetic, any sign of Q."""
    s = isqrt(D)
    if Q > 0:
        # sqrt(D) in (s, s+1) and no integer can separate (P+s)/Q from x
        return (P + s) // Q
    # Q < 0: x lies in ((P+s+1)/Q, (P+s)/Q); at most two floor candidates.
    # f = floor(x) iff f*Q - P > sqrt(D) and (f+1)*Q - P < sqrt(D).
    for f in ((P + s + 1) // Q, (P + s) // Q):
        if not _lt_sqrt(f * Q - P, D) and _lt_sqrt((f + 1) * Q - P, D):
            return f
    raise AssertionError("quadratic floor search failed")


def expand_cf(omega: Frequency, max_q: Optional[int], *,
              stop_product: Optional[int] = None,
              max_terms: int = 5000) -> ContinuedFraction:
    """All convergents with q_n <= max_q (or until q_n * q_{n+1} >= stop_product).

    Quadratic surds and rule-generated partial quotients expand by exact
    integer arithmetic, so the whole output is certified.  Decimal strings run
    an interval version of the algorithm and raise PrecisionExhausted when the
    residual interval no longer pins down the next integer part before max_q
    is reached.
    """
    if max_q is None and stop_product is None:
        raise ValueError("need max_q or stop_product")
    rep = omega.rep
    a_list: list[int] = []
    p_list: list[int] = []
    q_list: list[int] = []
    p_prev, q_prev = 1, 0  # p_{n-1}, q_{n-1} seeds: p_0=0/q_0=1 handled below
    p_cur, q_cur = 0, 1
    hit_max_q = False

    def push(a: int) -> bool:
        nonlocal p_prev, q_prev, p_cur, q_cur, hit_max_q
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        if max_q is not None and q_next > max_q:
            hit_max_q = True
            return False
        a_list.append(a)
        p_list.append(p_next)
        q_list.append(q_next)
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        return True

    def done() -> bool:
        if stop_product is not None and len(q_list) >= 2:
            return q_list[-1] * q_list[-2] >= stop_product
        return False

    terminated = False
    if isinstance(rep, PartialQuotients):
        q_hist = [1]
        m = 1
        while len(a_list) < max_terms and not done():
            a = rep.term(m, q_hist)
            if a is None:
                terminated = rep.rule is None
                break
            if not push(a):
                break
            q_hist.append(q_list[-1])
            m += 1
    elif isinstance(rep, QuadraticSurd):
        s = rep.normalized()
        P, D, Q = s.p, s.q * s.q * s.d, s.r
        if (D - P * P) % Q != 0:
            P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
        # iterate y = 1/x, a = floor(y), x = y - a
        while len(a_list) < max_terms and not done():
            # reciprocal: 1 / ((P + sqrt(D)) / Q) = (-P + sqrt(D)) / ((D - P^2)/Q)
            P, Q = -P, (D - P * P) // Q
            a = _exact_floor_surd(P, D, Q)
            if not push(a):
                break
            P = P - a * Q
    elif isinstance(rep, DecimalString):
        lo, hi = rep.interval()
        while len(a_list) < max_terms and not done():
            if lo <= 0:  # interval touches 0: next quotient uncertifiable
                raise PrecisionExhausted(
                    "decimal precision exhausted before reaching max_q",
                    partial=_freeze(omega, a_list, p_list, q_list, False),
                )
            inv_lo, inv_hi = 1 / hi, 1 / lo
            a_lo = inv_lo.numerator // inv_lo.denominator
            a_hi = inv_hi.numerator // inv_hi.denominator
            if a_lo != a_hi:
                raise PrecisionExhausted(
                    "decimal precision exhausted before reaching max_q",
                    partial=_freeze(omega, a_list, p_list, q_list, False),
                )
            if not push(a_lo):
                break
            lo, hi = inv_lo - a_lo, inv_hi - a_lo
    else:
        raise TypeError(f"unknown representation {type(rep).__name__}")

    # the searched range is fully covered only if the q ceiling stopped us;
    # an exhausted rule or a stop_product cutoff certifies coverage only up
    # to the last stored denominator
    searched = max_q if hit_max_q else (q_list[-1] if q_list else 0)
    return _freeze(omega, a_list, p_list, q_list, terminated, searched)


def _freeze(omega, a_list, p_list, q_list, terminated,
            max_q=None) -> ContinuedFraction:
    return ContinuedFraction(
        omega=omega,
        a=tuple(a_list),
        p=tuple(p_list),
        q=tuple(q_list),
        certified_len=len(a_list),
        terminated=terminated,
        max_q_searched=max_q,
    )


# ---------------------------------------------------------------------------
# best approximations and gaps
# ---------------------------------------------------------------------------


def norm_k_omega(omega: Frequency, k: int, bits: Optional[int] = None) -> float:
    """||k * omega|| from the exact fixed-point product."""
    bits = bits or omega.fractional_bits
    w = omega.fixed_point(bits)
    return fp_dist_to_Z(k * w, bits)


def is_best_approximation(omega: Frequency, q: int, cf: ContinuedFraction) -> bool:
    """True iff q is a certified convergent denominator of omega.

    q = 1 is vacuously a best approximation (no smaller candidates).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    top = cf.q[cf.certified_len - 1] if cf.certified_len else 0
    top = max(top, cf.max_q_searched or 0)
    if q == 1:
        return True
    if q > top and not cf.terminated:
        raise Uncertified(f"q={q} exceeds certified denominators (max {top})")
    return q in set(cf.q[: cf.certified_len])


def exhaustive_best_check(omega: Frequency, q: int) -> bool:
    """Direct scan: ||j*omega|| > ||q*omega|| for all 1 <= j < q."""
    bits = omega.fractional_bits
    w = omega.fixed_point(bits)
    one = 1 << bits
    half = one >> 1

    def num(j):
        v = (j * w) & (one - 1)
        return min(v, one - v)

    target = num(q)
    t = 0
    for j in range(1, q):
        t = t + w  # exact accumulation of j*w
        v = t & (one - 1)
        if min(v, one - v) <= target:
            return False
    return True


def gap_lower_bound_check(cf: ContinuedFraction, n: int, *,
                          exhaustive_limit: int = 20000,
                          samples: int = 4096, seed: int = 7) -> dict:
    """Check ||j*omega|| > 1/(2 q_n) for 1 <= |j| < q_n.

    Exhaustive below `exhaustive_limit`; above it a seeded sample of j values
    is scanned and the threshold is recorded in the report.
    """
    if n > cf.certified_len:
        raise Uncertified(f"index {n} beyond certified prefix")
    omega = cf.omega
    bits = omega.fractional_bits
    w = omega.fixed_point(bits)
    one = 1 << bits
    qn = cf.q_at(n)
    bound_num = one // (2 * qn)  # compare numerators: ||j w|| > 1/(2 q_n)

    exhaustive = qn <= exhaustive_limit
    if exhaustive:
        js = list(range(1, qn))
    else:
        import random

        rng = random.Random(seed)
        js = sorted(rng.sample(range(1, qn), min(samples, qn - 1)))
    ok = True
    min_margin = math.inf  # min over tested j of ||j w|| * 2 q_n (must stay > 1)
    for j in js:
        v = (j * w) & (one - 1)
        v = min(v, one - v)
        min_margin = min(min_margin, v * 2 * qn / one)
        if v * 2 * qn <= one:  # exact integer comparison
            ok = False
            break
    return {
        "ok": ok,
        "q_n": qn,
        "exhaustive": exhaustive,
        "threshold": exhaustive_limit,
        "checked": len(js),
        "min_margin": min_margin,
    }


def find_convergent_at_scale(cf: ContinuedFraction, N: int) -> tuple[int, int]:
    """The convergent (p, q) with the smallest certified q >= N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    for i in range(cf.certified_len):
        if cf.q[i] >= N:
            return cf.p[i], cf.q[i]
    raise Uncertified(f"no certified convergent reaches N={N}")


# ---------------------------------------------------------------------------
# Diophantine classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiophantineReport:
    gamma_sdc: float
    sdc_argmin_k: int
    gamma_dc: float
    A_dc: float
    beta_estimate: float
    bb_witnesses: tuple
    k_max: int
    witness_constant: float


def classify(omega: Frequency, cf: ContinuedFraction, k_max: int,
             witness_constant: float = 1.0) -> DiophantineReport:
    """Fit the arithmetic quality of omega over the certified prefix.

    gamma_sdc  exact min over 1 <= k <= k_max of ||k w|| * k * log^2(k+1)
    (gamma, A) least-squares fit of log q_{n+1} = log(1/gamma) + A log q_n
    beta       limsup log q_{n+1}/q_n, estimated as the max over the last
               third of the certified prefix (a max over the full prefix
               never decays, which would misreport bounded-quotient
               frequencies as strongly Liouville)
    witnesses  indices m with a_{m+1} >= witness_constant * m
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    if omega.is_rational() or cf.terminated:
        raise NotIrrational("Diophantine classification needs an irrational frequency")
    bits = omega.fractional_bits
    w = omega.fixed_point(bits)
    one = 1 << bits

    gamma_sdc = math.inf
    argmin_k = 1
    t = 0
    for k in range(1, k_max + 1):
        t += w
        v = t & (one - 1)
        v = min(v, one - v)
        val = (v / one) * k * math.log(k + 1) ** 2
        if val < gamma_sdc:
            gamma_sdc, argmin_k = val, k

    M = cf.certified_len
    xs, ys = [], []
    for n in range(1, M):
        xs.append(math.log(cf.q_at(n)))
        ys.append(math.log(cf.q_at(n + 1)))
    if len(xs) >= 2 and max(xs) > min(xs):
        n_pts = len(xs)
        sx, sy = sum(xs), sum(ys)
        sxx = sum(x * x for x in xs)
        sxy = sum(x * y for x, y in zip(xs, ys))
        A = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx)
        intercept = (sy - A * sx) / n_pts
        gamma_dc = math.exp(-intercept)
    else:
        A, gamma_dc = math.nan, math.nan

    tail_start = max(1, (2 * M) // 3)
    beta = 0.0
    for n in range(tail_start, M):
        beta = max(beta, math.log(cf.q_at(n + 1)) / cf.q_at(n))

    witnesses = tuple(
        m for m in range(1, M) if cf.a_at(m + 1) >= witness_constant * m
    )
    return DiophantineReport(
        gamma_sdc=gamma_sdc,
        sdc_argmin_k=argmin_k,
        gamma_dc=gamma_dc,
        A_dc=A,
        beta_estimate=beta,
        bb_witnesses=witnesses,
        k_max=k_max,
        witness_constant=witness_constant,
    )


# ---------------------------------------------------------------------------
# Ostrowski numeration
# ---------------------------------------------------------------------------


def ostrowski_digits(cf: ContinuedFraction, N: int) -> list[int]:
    """Greedy digits [b_0, b_1, ..., b_s] with N = b_0 + sum_n b_n q_n.

    Greedy from the largest certified q_n downward yields 0 <= b_n <= a_{n+1}
    and the standard carry rule (b_n = a_{n+1} forces b_{n-1} = 0).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    M = cf.certified_len
    covered = cf.terminated or (cf.max_q_searched or 0) >= N
    if M == 0 or not covered:
        raise Uncertified(f"certified convergents do not cover N={N}")
    digits = [0] * (M + 1)  # slot n holds b_n (q_0 = 1 slot is b_0)
    rem = N
    for n in range(M, 0, -1):
        qn = cf.q_at(n)
        if qn <= rem:
            digits[n] = rem // qn
            rem -= digits[n] * qn
    digits[0] = rem
    while len(digits) > 1 and digits[-1] == 0:
        digits.pop()
    return digits


def ostrowski_value(cf: ContinuedFraction, digits: Sequence[int]) -> int:
    """Reconstruct the integer encoded by Ostrowski digits."""
    total = digits[0] if digits else 0
    for n in range(1, len(digits)):
        total += digits[n] * cf.q_at(n)
    return total
