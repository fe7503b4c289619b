"""High-precision orbits, Birkhoff sums and averaged exponential sums.

Orbits advance in integer fixed point (value = coord / 2**bits), so the orbit
itself carries no drift: after N rotation steps the state equals the wide
product frac(x + N*omega) bit for bit.  Observables are evaluated in double
precision on arguments rounded from fixed point; the per-sample rounding
error is w(2**-52) * ||phi||_w, far below any deviation we measure.  Sums use
chunked pairwise summation with a compensated (Kahan) accumulation of chunk
totals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .arithmetic import ContinuedFraction, Frequency, fp_signed
from .errors import DimensionTooLarge, Uncertified
from .kernels import Observable, SeparableObservable

TWO_PI = 2.0 * math.pi

# Grid sweeps refuse to enumerate more than this many points.
GRID_POINT_BUDGET = 1 << 18


# ---------------------------------------------------------------------------
# state and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusPoint:
    """Point on the d-torus in fixed point: coordinate i is coords[i]/2**bits."""

    coords: tuple
    bits: int

    def __post_init__(self):
        one = 1 << self.bits
        if any(not 0 <= c < one for c in self.coords):
            raise ValueError("coordinates must already be reduced mod 1")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @staticmethod
    def from_floats(xs: Sequence[float], bits: int) -> "TorusPoint":
        one = 1 << bits
        coords = tuple(int(round((x % 1.0) * one)) % one for x in xs)
        return TorusPoint(coords, bits)

    @staticmethod
    def zero(dim: int, bits: int) -> "TorusPoint":
        return TorusPoint((0,) * dim, bits)

    def to_floats(self) -> np.ndarray:
        one = float(1 << self.bits)
        return np.array([c / one for c in self.coords])

    def translate(self, deltas: Sequence[int]) -> "TorusPoint":
        one = 1 << self.bits
        return TorusPoint(
            tuple((c + d) % one for c, d in zip(self.coords, deltas)), self.bits
        )


@dataclass(frozen=True)
class SystemSpec:
    """One of the three measured systems.

    rotation1d: x -> x + omega on the circle
    rotationd:  x -> x + (omega_1, ..., omega_d) on the d-torus
    skew:       (x_1, ..., x_d) -> (x_1 + x_2, ..., x_{d-1} + x_d, x_d + omega)
    """

    kind: str
    freqs: tuple
    dim: int
    bits: int = 192

    def __post_init__(self):
        if self.kind not in ("rotation1d", "rotationd", "skew"):
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind == "rotation1d" and (self.dim != 1 or len(self.freqs) != 1):
            raise ValueError("rotation1d is one-dimensional")
        if self.kind == "rotationd" and len(self.freqs) != self.dim:
            raise ValueError("rotationd needs one frequency per axis")
        if self.kind == "skew" and (self.dim < 2 or len(self.freqs) != 1):
            raise ValueError("skew product needs dim >= 2 and a single frequency")

    def omega_fp(self) -> tuple:
        return tuple(f.fixed_point(self.bits) for f in self.freqs)

    @staticmethod
    def rotation(omega: Frequency, bits: int = 192) -> "SystemSpec":
        return SystemSpec("rotation1d", (omega,), 1, bits)

    @staticmethod
    def rotation_d(omegas: Sequence[Frequency], bits: int = 192) -> "SystemSpec":
        return SystemSpec("rotationd", tuple(omegas), len(tuple(omegas)), bits)

    @staticmethod
    def skew(dim: int, omega: Frequency, bits: int = 192) -> "SystemSpec":
        return SystemSpec("skew", (omega,), dim, bits)


def step(sys: SystemSpec, x: TorusPoint) -> TorusPoint:
    """Single application of the map, exact in fixed point."""
    one = 1 << sys.bits
    c = list(x.coords)
    if sys.kind == "rotation1d" or sys.kind == "rotationd":
        for i, w in enumerate(sys.omega_fp()):
            c[i] = (c[i] + w) % one
        return TorusPoint(tuple(c), x.bits)
    w = sys.omega_fp()[0]
    d = sys.dim
    for i in range(d - 1):
        c[i] = (c[i] + c[i + 1]) % one  # reads the pre-step value of c[i+1]
    c[d - 1] = (c[d - 1] + w) % one
    return TorusPoint(tuple(c), x.bits)


def iterate(sys: SystemSpec, x: TorusPoint, j: int) -> TorusPoint:
    """Closed-form j-th iterate (binomial weights for the skew product)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    one = 1 << sys.bits
    if sys.kind in ("rotation1d", "rotationd"):
        ws = sys.omega_fp()
        return TorusPoint(
            tuple((c + j * w) % one for c, w in zip(x.coords, ws)), x.bits
        )
    w = sys.omega_fp()[0]
    d = sys.dim
    out = []
    for i in range(1, d + 1):
        acc = 0
        for l in range(0, d - i + 1):
            acc += comb(j, l) * x.coords[i + l - 1]
        acc += comb(j, d - i + 1) * w
        out.append(acc % one)
    return TorusPoint(tuple(out), x.bits)


# ---------------------------------------------------------------------------
# orbit enumeration (rotations share one orbit shape across starting points)
# ---------------------------------------------------------------------------


def rotation_orbit_floats(sys: SystemSpec, x: TorusPoint, N: int,
                          chunk: int = 1 << 15):
    """Yield float arrays of orbit positions x + j*omega, j = 0..N-1.

    The underlying accumulation is exact integer fixed point; only the final
    per-sample conversion rounds.  For rotationd the yielded array has shape
    (chunk, d).
    """
    one = 1 << sys.bits
    scale = 1.0 / one
    ws = sys.omega_fp()
    cur = list(x.coords)
    d = len(cur)
    produced = 0
    while produced < N:
        m = min(chunk, N - produced)
        if d == 1:
            w = ws[0]
            c = cur[0]
            buf = np.empty(m, dtype=float)
            for i in range(m):
                buf[i] = c * scale
                c = (c + w) % one
            cur[0] = c
        else:
            buf = np.empty((m, d), dtype=float)
            for i in range(m):
                for a in range(d):
                    buf[i, a] = cur[a] * scale
                for a in range(d):
                    cur[a] = (cur[a] + ws[a]) % one
        produced += m
        yield buf


def skew_orbit_floats(sys: SystemSpec, x: TorusPoint, N: int,
                      chunk: int = 1 << 14):
    """Yield (chunk, d) float arrays of the skew-product orbit of x."""
    one = 1 << sys.bits
    scale = 1.0 / one
    w = sys.omega_fp()[0]
    d = sys.dim
    cur = list(x.coords)
    produced = 0
    while produced < N:
        m = min(chunk, N - produced)
        buf = np.empty((m, d), dtype=float)
        for i in range(m):
            for a in range(d):
                buf[i, a] = cur[a] * scale
            for a in range(d - 1):
                cur[a] = (cur[a] + cur[a + 1]) % one
            cur[d - 1] = (cur[d - 1] + w) % one
        produced += m
        yield buf


def _orbit_chunks(sys: SystemSpec, x: TorusPoint, N: int):
    if sys.kind in ("rotation1d", "rotationd"):
        return rotation_orbit_floats(sys, x, N)
    return skew_orbit_floats(sys, x, N)


def birkhoff_sum(sys: SystemSpec, phi: Observable, x: TorusPoint, N: int) -> float:
    """S_N phi(x) = phi(x) + phi(Tx) + ... + phi(T^{N-1} x)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if phi.dim != sys.dim:
        raise ValueError("observable dimension does not match the system")
    total = 0.0
    carry = 0.0
    for buf in _orbit_chunks(sys, x, N):
        s = float(np.sum(phi.fn(buf)))
        # Kahan accumulation of chunk totals
        y = s - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


# ---------------------------------------------------------------------------
# sup deviation over a grid
# ---------------------------------------------------------------------------


@dataclass
class BirkhoffResult:
    N: int
    grid_size: int
    sup_dev: float
    argmax_x: TorusPoint
    mean_used: float


def _dev_field_rotation_1d_modes(sys, phi, N, grid, mean):
    """Mode-split deviation field for lacunary/mode-sum observables.

    Per mode the orbit character sum A_k = sum_j e(q_k * j * omega) is
    accumulated by direct summation (step reduced mod 1 exactly first);
    the grid field is then e(q_k x_g)-synthesized through one FFT, exact
    because x_g = g/G makes e(q_k x_g) periodic with index q_k mod G.
    """
    G = grid
    one = 1 << sys.bits
    w_fp = sys.omega_fp()[0]
    spec = np.zeros(G, dtype=complex)
    chunk = 1 << 20
    for q, w in zip(phi.qs, phi.weights):
        if w == 0.0:
            continue
        step = ((q * w_fp) % one) / one
        acc = 0.0 + 0.0j
        for lo in range(0, N, chunk):
            js = np.arange(lo, min(N, lo + chunk), dtype=float)
            acc += complex(np.sum(np.exp(2j * math.pi * np.mod(js * step, 1.0))))
        spec[q % G] += w * acc
    field = np.real(np.fft.ifft(spec)) * G
    xs = np.arange(G) / G
    return np.abs(field / N - mean), xs


def _dev_field_rotation_1d(sys, phi, N, grid, mean):
    G = grid
    xs = np.arange(G) / G
    sums = np.zeros(G)
    carry = np.zeros(G)
    chunk = max(256, (1 << 22) // G)  # keep the (chunk, G) work array ~32 MB
    for buf in rotation_orbit_floats(sys, TorusPoint.zero(1, sys.bits), N,
                                     chunk=chunk):
        pts = np.mod(buf[:, None] + xs[None, :], 1.0)
        vals = np.asarray(phi.fn(pts), dtype=float)
        s = vals.sum(axis=0)
        y = s - carry
        t = sums + y
        carry = (t - sums) - y
        sums = t
    return np.abs(sums / N - mean), xs


def _dev_field_rotation_d_separable(sys, phi: SeparableObservable, N, grid, mean):
    """Mode/axis-split measurement for rotations in dimension d.

    Character sums sum_j e(k . (j omega)) are accumulated by direct
    summation over the actual orbit; the grid field is then synthesized per
    mode.  Axis terms reduce to 1-d orbit sums on their own axis.
    """
    d = sys.dim
    G = grid
    field = np.zeros((G,) * d)
    if phi.trig is not None and phi.trig.coeffs:
        spec = np.zeros((G,) * d, dtype=complex)
        ks = list(phi.trig.coeffs)  # constant mode included: A_0 = N exactly
        char = {k: 0.0 + 0.0j for k in ks}
        for buf in rotation_orbit_floats(sys, TorusPoint.zero(d, sys.bits), N):
            for k in ks:
                phase = buf @ np.array(k, dtype=float)
                char[k] += np.exp(2j * math.pi * phase).sum()
        for k in ks:
            idx = tuple(i % G for i in k)
            spec[idx] += phi.trig.coeffs[k] * char[k]
        # e(k . x_g) synthesis over the uniform grid = inverse FFT
        field += np.real(np.fft.ifftn(spec)) * G ** d
    for axis, sub in phi.axis_terms:
        sub_sys = SystemSpec.rotation(sys.freqs[axis], sys.bits)
        xs = np.arange(G) / G
        sums = np.zeros(G)
        for buf in rotation_orbit_floats(sub_sys, TorusPoint.zero(1, sys.bits), N):
            pts = np.mod(buf[:, None] + xs[None, :], 1.0)
            sums += np.asarray(sub.fn(pts), dtype=float).sum(axis=0)
        shape = [1] * d
        shape[axis] = G
        field += sums.reshape(shape)
    return np.abs(field / N - mean)


def _dev_field_generic(sys, phi, N, grid, mean):
    """Brute-force per-grid-point orbits (skew products, small grids)."""
    d = sys.dim
    G = grid
    if G ** d > GRID_POINT_BUDGET:
        raise DimensionTooLarge(f"grid {G}^{d} exceeds the point budget")
    one = 1 << sys.bits
    if (one % G) != 0:
        raise ValueError("grid must divide the fixed-point scale (power of two)")
    unit = one // G
    devs = np.zeros((G,) * d)
    import itertools

    for idx in itertools.product(range(G), repeat=d):
        x = TorusPoint(tuple(i * unit for i in idx), sys.bits)
        s = birkhoff_sum(sys, phi, x, N)
        devs[idx] = abs(s / N - mean)
    return devs


def sup_deviation(sys: SystemSpec, phi: Observable, N: int, grid: int) -> BirkhoffResult:
    """Max over a uniform grid of |S_N phi / N - mean(phi)|.

    The grid maximum is a certified lower bound of the true sup; Holder
    continuity bounds the gap by ||phi||_w * w(1/grid).
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    d = sys.dim
    if d > 3 or grid ** d > GRID_POINT_BUDGET:
        raise DimensionTooLarge(
            f"{d} * log2({grid}) exceeds the grid budget "
            f"(d <= 3, at most {GRID_POINT_BUDGET} points)"
        )
    mean = phi.mean()
    one = 1 << sys.bits

    def grid_point(indices) -> TorusPoint:
        return TorusPoint(
            tuple((int(i) * one + grid // 2) // grid % one for i in indices),
            sys.bits,
        )

    if d == 1:
        if hasattr(phi, "qs") and hasattr(phi, "weights"):
            devs, xs = _dev_field_rotation_1d_modes(sys, phi, N, grid, mean)
        else:
            devs, xs = _dev_field_rotation_1d(sys, phi, N, grid, mean)
        arg = int(np.argmax(devs))
        return BirkhoffResult(N, grid, float(devs[arg]), grid_point((arg,)), mean)
    if sys.kind == "rotationd" and isinstance(phi, SeparableObservable):
        devs = _dev_field_rotation_d_separable(sys, phi, N, grid, mean)
    else:
        devs = _dev_field_generic(sys, phi, N, grid, mean)
    flat = int(np.argmax(devs))
    idx = np.unravel_index(flat, devs.shape)
    return BirkhoffResult(N, grid, float(devs[idx]), grid_point(idx), mean)


# ---------------------------------------------------------------------------
# averaged exponential sums
# ---------------------------------------------------------------------------


def exp_sum_avg(t: float, N: int) -> complex:
    """(1/N) sum_{j<N} e(jt) by the closed geometric form; |result| <= 1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    tr = t - round(t)
    if tr == 0.0:
        return 1.0 + 0.0j
    nt = math.fmod(N * tr, 1.0)
    den = 1.0 - cmath.exp(2j * math.pi * tr)
    if abs(den) < 1e-12:
        # t within rounding of an integer: all terms effectively 1
        return 1.0 + 0.0j
    num = 1.0 - cmath.exp(2j * math.pi * nt)
    val = num / den / N
    m = abs(val)
    return val / m if m > 1.0 else val


def exp_sum_avg_fp(t_fp: int, bits: int, N: int) -> complex:
    """Same sum with t = t_fp / 2**bits; both phase reductions exact mod 1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    one = 1 << bits
    t_red = t_fp % one
    if t_red == 0:
        return 1.0 + 0.0j
    nt = fp_signed(N * t_fp, bits) / one
    tr = fp_signed(t_fp, bits) / one
    den = 1.0 - cmath.exp(2j * math.pi * tr)
    if abs(den) == 0.0:
        return 1.0 + 0.0j
    val = (1.0 - cmath.exp(2j * math.pi * nt)) / den / N
    m = abs(val)
    return val / m if m > 1.0 else val


def exp_sum_direct(t: float, N: int) -> complex:
    """Brute-force oracle for the geometric form."""
    acc = 0.0 + 0.0j
    for j in range(N):
        acc += cmath.exp(2j * math.pi * math.fmod(j * t, 1.0))
    return acc / N


@dataclass
class KernelSumResult:
    q: int
    N: int
    total: float
    ratio: float  # total * N / (q log q)


def kernel_sum(omega: Frequency, cf: ContinuedFraction, q_index: int, N: int) -> KernelSumResult:
    """sum_{1 <= |k| < q_n} |E_N(k omega)| with exact fixed-point phases.

    Returns the sum and its ratio against q log(q) / N, the shape the
    best-approximation gap structure forces on it.
    """
    if q_index > cf.certified_len:
        raise Uncertified(f"index {q_index} beyond certified prefix")
    q = cf.q_at(q_index)
    bits = omega.fractional_bits
    w = omega.fixed_point(bits)
    one = 1 << bits
    if q < 2:
        return KernelSumResult(q, N, 0.0, 0.0)
    # |E_N(t)| = |sin(pi {Nt})| / (N |sin(pi {t})|), both arguments reduced
    # exactly in fixed point before the trig evaluation
    t_frac = np.empty(q - 1, dtype=float)
    nt_frac = np.empty(q - 1, dtype=float)
    acc = 0
    for k in range(1, q):
        acc = (acc + w) % one
        t_frac[k - 1] = acc / one
        nt_frac[k - 1] = ((N * acc) % one) / one
    mags = np.abs(np.sin(math.pi * nt_frac)) / (N * np.abs(np.sin(math.pi * t_frac)))
    np.minimum(mags, 1.0, out=mags)
    total = 2.0 * float(np.sum(mags))  # |E_N(-t)| = |E_N(t)|
    ratio = total * N / (q * math.log(q)) if q > 1 else 0.0
    return KernelSumResult(q, N, total, ratio)


# ---------------------------------------------------------------------------
# character sums along the skew product
# ---------------------------------------------------------------------------


@dataclass
class CharSumResult:
    value: complex
    degree: int
    leading_num: int      # leading coefficient = leading_num * omega / leading_den
    leading_den: int
    N: int


def phase_polynomial_table(sys: SystemSpec, k: Sequence[int], x: TorusPoint) -> list:
    """p(0..deg) where p(j) = k . S^j x, as exact fixed-point integers."""
    d = sys.dim
    first = next(i for i, ki in enumerate(k) if ki)  # 0-based index of k_i != 0
    deg = d - first
    one = 1 << sys.bits
    vals = []
    for j in range(deg + 1):
        y = iterate(sys, x, j)
        acc = 0
        for ki, c in zip(k, y.coords):
            acc += ki * c
        vals.append(acc % one)
    return vals


def char_birkhoff_skew(d: int, omega: Frequency, k: Sequence[int], x: TorusPoint,
                       N: int, bits: int = 192) -> CharSumResult:
    """sum_{j<N} e(k . S^j x) via exact finite differences of the phase.

    The phase is a degree-<=d integer-coefficient polynomial in j once
    reduced mod 1; deg+1 fixed-point registers advance it with deg exact
    additions per step.  Also classifies the polynomial degree and leading
    coefficient (k_i / (d-i+1)!) * omega.
    """
    k = tuple(int(v) for v in k)
    if len(k) != d or not any(k):
        raise ValueError("k must have length d and a nonzero entry")
    if x.bits != bits:
        raise ValueError("x and the phase registers must share the bit budget")
    sys = SystemSpec.skew(d, omega, bits)
    one = 1 << bits
    vals = phase_polynomial_table(sys, k, x)
    deg = len(vals) - 1
    # forward-difference table at j = 0
    table = list(vals)
    regs = []
    for r in range(deg + 1):
        regs.append(table[0])
        table = [(table[i + 1] - table[i]) % one for i in range(len(table) - 1)]
    total = 0.0 + 0.0j
    chunk = 1 << 12
    buf = np.empty(chunk, dtype=float)
    filled = 0
    for _ in range(N):
        buf[filled] = regs[0] / one
        filled += 1
        if filled == chunk:
            total += complex(np.sum(np.exp(2j * math.pi * buf)))
            filled = 0
        for r in range(deg):
            regs[r] = (regs[r] + regs[r + 1]) % one
    if filled:
        total += complex(np.sum(np.exp(2j * math.pi * buf[:filled])))
    first = next(i for i, ki in enumerate(k) if ki)
    return CharSumResult(
        value=total,
        degree=d - first,
        leading_num=k[first],
        leading_den=math.factorial(d - first),
        N=N,
    )
