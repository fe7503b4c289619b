"""Fourier coefficients, summability kernels and trigonometric approximation.

Conventions: e(x) = exp(2*pi*i*x); the k-th Fourier coefficient of phi is
the integral of phi(x) e(-k x) over the torus, computed here by uniform-grid
quadrature (exact for trigonometric polynomials once the grid outruns the
degrees involved, O(w(1/Q)) otherwise).

The smoothing kernel is built by squaring the triangular-coefficient kernel
of half the degree and renormalizing so the 0-coefficient is exactly 1; the
normalization happens in coefficient space with integer arithmetic, so mass
conservation is exact rather than quadrature-approximate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# moduli of continuity
# ---------------------------------------------------------------------------


class ModulusOfContinuity:
    """Strictly increasing, sub-additive gauge with w(0) = 0."""

    kind = "custom"

    def __call__(self, h: float) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind


class Holder(ModulusOfContinuity):
    """w(h) = h**alpha, 0 < alpha <= 1."""

    kind = "holder"

    def __init__(self, alpha: float):
        if not 0 < alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        self.alpha = alpha

    def __call__(self, h):
        return h ** self.alpha if h > 0 else 0.0

    def describe(self):
        return f"holder:{self.alpha}"


class WeakHolder(ModulusOfContinuity):
    """w(h) = exp(-alpha * log(1/h)**kappa), valid for h in [0, 1)."""

    kind = "weak_holder"

    def __init__(self, alpha: float, kappa: float):
        if not (0 < alpha <= 1 and 0 < kappa <= 1):
            raise ValueError("alpha, kappa must be in (0, 1]")
        self.alpha = alpha
        self.kappa = kappa

    def __call__(self, h):
        if h <= 0:
            return 0.0
        if h >= 1:
            return 1.0
        return math.exp(-self.alpha * math.log(1.0 / h) ** self.kappa)

    def describe(self):
        return f"weak_holder:{self.alpha},{self.kappa}"


class LogHolder(ModulusOfContinuity):
    """w(h) = 1 / log(1/h); increasing and concave for h <= e**-2."""

    kind = "log_holder"

    def __call__(self, h):
        if h <= 0:
            return 0.0
        h = min(h, math.exp(-2.0))
        return 1.0 / math.log(1.0 / h)

    def describe(self):
        return "log_holder"


class CustomModulus(ModulusOfContinuity):
    kind = "custom"

    def __init__(self, fn: Callable[[float], float], name: str = "custom"):
        self.fn = fn
        self.name = name

    def __call__(self, h):
        return self.fn(h) if h > 0 else 0.0

    def describe(self):
        return self.name


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------


@dataclass
class Observable:
    """A real function on the d-torus with declared regularity.

    `fn` must be vectorized: for dim == 1 it maps an ndarray of positions to
    values; for dim >= 2 it takes an ndarray of shape (..., dim).  `norm_est`
    is an upper bound on the w-Holder norm when analytic (flag in
    `norm_is_bound`), otherwise a sampled lower-bound estimate.
    """

    dim: int
    fn: Callable
    modulus: ModulusOfContinuity
    norm_est: float
    mean_hint: Optional[float] = None
    name: str = ""
    norm_is_bound: bool = True

    def __call__(self, x):
        return self.fn(x)

    def mean(self, quad_points: int = 1 << 16) -> float:
        if self.mean_hint is not None:
            return self.mean_hint
        if self.dim == 1:
            xs = (np.arange(quad_points) + 0.5) / quad_points
            return float(np.mean(self.fn(xs)))
        side = max(64, int(round(quad_points ** (1.0 / self.dim))))
        axes = [(np.arange(side) + 0.5) / side] * self.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return float(np.mean(self.fn(mesh)))


@dataclass
class SeparableObservable(Observable):
    """Sum of an exact trigonometric polynomial and per-axis 1-d terms.

    The split lets rotation experiments measure orbit sums mode-by-mode and
    axis-by-axis (direct summation over the orbit in each piece) instead of
    brute-forcing the full product grid.
    """

    trig: Optional["TrigPoly"] = None
    axis_terms: tuple = ()  # tuple of (axis index, 1-d Observable)


def make_separable(dim: int, trig: Optional["TrigPoly"],
                   axis_terms: Sequence, name: str = "separable",
                   modulus: Optional[ModulusOfContinuity] = None) -> "SeparableObservable":
    """Combine a trig polynomial and per-axis 1-d observables by summation.

    Norm estimates add (triangle inequality in the common modulus); the mean
    is the polynomial's constant coefficient plus the axis means.
    """
    axis_terms = tuple(axis_terms)
    modulus = modulus or (axis_terms[0][1].modulus if axis_terms else Holder(1.0))

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        if trig is not None:
            out = out + trig.eval(x)
        for axis, sub in axis_terms:
            out = out + sub.fn(x[..., axis])
        return out

    mean = 0.0
    norm = 0.0
    if trig is not None:
        tobs = trig.to_observable(modulus)
        mean += tobs.mean_hint
        norm += tobs.norm_est
    for _, sub in axis_terms:
        mean += sub.mean()
        norm += sub.norm_est
    return SeparableObservable(
        dim=dim, fn=fn, modulus=modulus, norm_est=norm, mean_hint=mean,
        name=name, trig=trig, axis_terms=axis_terms,
    )


def dist_to_nearest_int(x):
    f = np.mod(x, 1.0)
    return np.minimum(f, 1.0 - f)


def make_dist_pow(alpha: float, dim: int = 1) -> Observable:
    """phi(x) = ||x||**alpha (distance to the nearest integer, first axis)."""

    if dim == 1:
        def fn(x):
            u = dist_to_nearest_int(np.asarray(x, dtype=float))
            return np.sqrt(u) if alpha == 0.5 else u ** alpha
    else:
        def fn(x):
            u = dist_to_nearest_int(np.asarray(x, dtype=float)[..., 0])
            return np.sqrt(u) if alpha == 0.5 else u ** alpha

    # sup = (1/2)^alpha; Holder seminorm is exactly 1 (attained at 0)
    norm = 0.5 ** alpha + 1.0
    mean = 0.5 ** alpha / (1.0 + alpha)
    return Observable(
        dim=dim, fn=fn, modulus=Holder(alpha), norm_est=norm,
        mean_hint=mean, name=f"dist_pow:{alpha}",
    )


def make_cos(dim: int = 1) -> Observable:
    if dim == 1:
        def fn(x):
            return np.cos(TWO_PI * np.asarray(x, dtype=float))
    else:
        def fn(x):
            return np.cos(TWO_PI * np.asarray(x, dtype=float)[..., 0])

    return Observable(
        dim=dim, fn=fn, modulus=Holder(1.0), norm_est=1.0 + TWO_PI,
        mean_hint=0.0, name="cos",
    )


def make_coboundary(omega_value: float) -> Observable:
    """psi(x + omega) - psi(x) with psi = cos(2 pi x); Birkhoff sums telescope."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.cos(TWO_PI * (x + omega_value)) - np.cos(TWO_PI * x)

    return Observable(
        dim=1, fn=fn, modulus=Holder(1.0), norm_est=2.0 * (1.0 + TWO_PI),
        mean_hint=0.0, name="coboundary",
    )


def make_weierstrass(modulus: ModulusOfContinuity, base: int = 2,
                     terms: int = 24) -> Observable:
    """phi(x) = sum_m w(b^-m) cos(2 pi b^m x), the classical rough test function."""

    weights = np.array([modulus(base ** -m) for m in range(1, terms + 1)])
    freqs = np.array([base ** m for m in range(1, terms + 1)], dtype=float)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.cos(TWO_PI * np.multiply.outer(x, freqs)) @ weights

    # rigorous per-h bound sum_m w_m min(2, 2 pi b^m h), maximized over a
    # log grid of offsets; the sup norm adds sum w_m
    semi = 0.0
    for k in range(2, 40):
        h = 2.0 ** -k
        semi = max(semi, float(np.minimum(2.0, TWO_PI * freqs * h) @ weights)
                   / modulus(h))
    return Observable(
        dim=1, fn=fn, modulus=modulus,
        norm_est=float(weights.sum()) + semi,
        mean_hint=0.0, name=f"weierstrass:{modulus.describe()}",
    )


def make_observable(key: str, dim: int = 1) -> Observable:
    """Registry lookup: "dist_pow:a", "cos", "coboundary:omega", "weierstrass_w:a"."""
    if key.startswith("dist_pow:"):
        return make_dist_pow(float(key.split(":")[1]), dim)
    if key == "cos":
        return make_cos(dim)
    if key.startswith("coboundary"):
        parts = key.split(":")
        omega = float(parts[1]) if len(parts) > 1 else 0.5 * (5 ** 0.5 - 1)
        return make_coboundary(omega)
    if key.startswith("weierstrass_w:"):
        return make_weierstrass(Holder(float(key.split(":")[1])))
    raise KeyError(
        f"unknown observable {key!r} (frequency-coupled keys like "
        f"'lacunary:...' resolve through the experiment harness)"
    )


def sampled_holder_quotient(phi: Observable, alpha: float, n_pairs: int = 1000,
                            seed: int = 11) -> float:
    """Max sampled |phi(x+h) - phi(x)| / h**alpha over dyadic h."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(4, 21):
        h = 2.0 ** -k
        if phi.dim == 1:
            xs = rng.random(n_pairs)
            d = np.abs(phi.fn(xs + h) - phi.fn(xs))
        else:
            xs = rng.random((n_pairs, phi.dim))
            shift = np.zeros(phi.dim)
            shift[0] = h
            d = np.abs(phi.fn(xs + shift) - phi.fn(xs))
        worst = max(worst, float(d.max()) / h ** alpha)
    return worst


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------


@dataclass
class TrigPoly:
    """Finitely supported Fourier coefficients on Z^d (sup-norm degree)."""

    dim: int
    coeffs: dict  # tuple[int,...] -> complex

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(i) for i in k) for k in self.coeffs)

    def coeff(self, k) -> complex:
        k = self._key(k)
        return self.coeffs.get(k, 0.0 + 0.0j)

    def _key(self, k):
        if isinstance(k, int):
            k = (k,)
        return tuple(int(i) for i in k)

    def eval(self, x):
        """Direct coefficient-sum evaluation; x is scalar/array (dim 1) or
        (..., dim)."""
        if self.dim == 1:
            x = np.asarray(x, dtype=float)
            out = np.zeros(np.shape(x), dtype=complex)
            for (k,), c in self.coeffs.items():
                out = out + c * np.exp(2j * math.pi * k * x)
            return np.real(out)
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for k, c in self.coeffs.items():
            phase = np.tensordot(x, np.array(k, dtype=float), axes=([-1], [0]))
            out = out + c * np.exp(2j * math.pi * phase)
        return np.real(out)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        for k, c in self.coeffs.items():
            mk = tuple(-i for i in k)
            if abs(np.conj(self.coeffs.get(mk, 0.0)) - c) > tol:
                return False
        return True

    def to_observable(self, modulus: Optional[ModulusOfContinuity] = None) -> Observable:
        """Wrap as a real observable with an analytic Holder-norm bound."""
        modulus = modulus or Holder(1.0)
        sup = float(sum(abs(c) for c in self.coeffs.values()))
        lip = float(sum(
            TWO_PI * max((abs(i) for i in k), default=0) * abs(c)
            for k, c in self.coeffs.items()
        ))
        if isinstance(modulus, Holder) and modulus.alpha < 1.0:
            # |P(x)-P(y)| <= min(2 sup, L h): / h^alpha maximized at h*=2 sup/L
            semi = (2 * sup) ** (1 - modulus.alpha) * lip ** modulus.alpha \
                if lip > 0 else 0.0
        else:
            semi = lip
        mean = float(np.real(self.coeff((0,) * self.dim)))
        return Observable(
            dim=self.dim, fn=self.eval, modulus=modulus,
            norm_est=sup + semi, mean_hint=mean, name="trigpoly",
        )

    def to_json(self) -> str:
        rows = [
            {"k": list(k), "re": float(np.real(c)), "im": float(np.imag(c))}
            for k, c in sorted(self.coeffs.items())
        ]
        return json.dumps({"dim": self.dim, "degree": self.degree, "coeffs": rows})

    @staticmethod
    def from_json(text: str) -> "TrigPoly":
        obj = json.loads(text)
        coeffs = {
            tuple(row["k"]): complex(row["re"], row["im"]) for row in obj["coeffs"]
        }
        return TrigPoly(dim=int(obj["dim"]), coeffs=coeffs)


def random_real_trigpoly(dim: int, degree: int, seed: int = 0,
                         scale: float = 1.0) -> TrigPoly:
    """Random real trig polynomial (Hermitian coefficients), for tests."""
    rng = np.random.default_rng(seed)
    coeffs: dict = {}
    ranges = [range(-degree, degree + 1)] * dim
    import itertools

    for k in itertools.product(*ranges):
        if k in coeffs or tuple(-i for i in k) in coeffs:
            continue
        if all(i == 0 for i in k):
            coeffs[k] = complex(rng.normal() * scale, 0.0)
            continue
        c = complex(rng.normal(), rng.normal()) * scale / 2
        coeffs[k] = c
        coeffs[tuple(-i for i in k)] = np.conj(c)
    return TrigPoly(dim=dim, coeffs=coeffs)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _sinc(t):
    return np.sinc(t)  # sin(pi t)/(pi t), 1 at t = 0


def dirichlet(n: int, x) -> np.ndarray | float:
    """D_n(x) = sum_{|k|<=n} e(kx) = sin((2n+1) pi x)/sin(pi x)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    xr = x - np.round(x)  # the ratio form is invariant under x -> x +- 1
    out = (2 * n + 1) * _sinc((2 * n + 1) * xr) / _sinc(xr)
    return float(out) if out.ndim == 0 else out


def dirichlet_coeff_sum(n: int, x) -> np.ndarray | float:
    """Direct (2n+1)-term summation; the oracle for the closed form."""
    x = np.asarray(x, dtype=float)
    out = np.ones(np.shape(x), dtype=complex)
    for k in range(1, n + 1):
        out += np.exp(2j * math.pi * k * x) + np.exp(-2j * math.pi * k * x)
    re = np.real(out)
    return float(re) if re.ndim == 0 else re


def fejer(n: int, x) -> np.ndarray | float:
    """F_n(x) = sum_{|k|<=n} (1 - |k|/n) e(kx) = (1/n) (sin(n pi x)/sin(pi x))^2.

    The coefficient form is normative; the closed form (stated with its
    half-angle convention elsewhere) is evaluated with argument pi*x under
    e(x) = exp(2 pi i x).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    xr = x - np.round(x)
    ratio = _sinc(n * xr) / _sinc(xr)
    out = n * ratio * ratio
    return float(out) if out.ndim == 0 else out


def fejer_coeff_sum(n: int, x) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    out = np.ones(np.shape(x), dtype=complex)
    for k in range(1, n):
        w = 1.0 - k / n
        out += w * (np.exp(2j * math.pi * k * x) + np.exp(-2j * math.pi * k * x))
    re = np.real(out)
    return float(re) if re.ndim == 0 else re


def jackson_coeffs(n: int) -> dict:
    """Coefficients of the degree-<=n positive kernel with unit mass.

    Built as c_n * F_m^2 with m = n//2: the coefficient sequence is the
    autocorrelation of the triangle coefficients, normalized exactly by its
    own 0-lag value (integer arithmetic), so coeff[0] == 1.0 exactly.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    m = n // 2
    tri = np.array([m - abs(j) for j in range(-(m - 1), m)], dtype=np.int64)
    corr = np.convolve(tri, tri)  # lags -(2m-2) .. (2m-2), integer exact
    center = len(corr) // 2
    c0 = int(corr[center])
    coeffs = {}
    for i, v in enumerate(corr):
        k = i - center
        if v:
            coeffs[(k,)] = complex(int(v) / c0, 0.0)
    return coeffs


def jackson(n: int) -> TrigPoly:
    return TrigPoly(dim=1, coeffs=jackson_coeffs(n))


def jackson_closed_form(n: int, x) -> np.ndarray | float:
    """c_n F_m(x)^2 evaluated directly; cross-check for the coefficient form."""
    m = n // 2
    tri = np.array([m - abs(j) for j in range(-(m - 1), m)], dtype=np.int64)
    c0 = int(np.convolve(tri, tri)[2 * m - 2])
    f = np.asarray(fejer(m, x), dtype=float)
    out = f * f * (m * m / c0)
    return float(out) if out.ndim == 0 else out


def jackson_d(n: int, d: int) -> TrigPoly:
    """Tensor-product kernel: coefficient at k is the product over axes."""
    if d < 1:
        raise ValueError("d must be >= 1")
    base = jackson_coeffs(n)
    if d == 1:
        return TrigPoly(dim=1, coeffs=base)
    coeffs: dict = {}
    keys = sorted(base)
    import itertools

    for combo in itertools.product(keys, repeat=d):
        k = tuple(c[0] for c in combo)
        v = 1.0
        for c in combo:
            v *= base[c].real
        coeffs[k] = complex(v, 0.0)
    return TrigPoly(dim=d, coeffs=coeffs)


# ---------------------------------------------------------------------------
# quadrature and approximation
# ---------------------------------------------------------------------------


def fourier_coefficient(phi: Observable, k, quad_points: Optional[int] = None) -> complex:
    """Uniform-grid quadrature of the defining integral (approximate).

    Exact for trig polynomials whenever quad_points outruns the spectrum
    (no aliasing); O(w(1/Q)) error otherwise.
    """
    if isinstance(k, int):
        k = (k,)
    k = tuple(int(i) for i in k)
    kmax = max((abs(i) for i in k), default=0)
    Q = quad_points or max(64, 8 * max(kmax, 1))
    if Q < 4 * max(kmax, 1):
        raise ValueError("quad_points must be >= 4 * max(|k|, 1) per dimension")
    if phi.dim == 1:
        xs = np.arange(Q) / Q
        vals = np.asarray(phi.fn(xs), dtype=float)
        return complex(np.sum(vals * np.exp(-2j * math.pi * k[0] * xs)) / Q)
    axes = [np.arange(Q) / Q] * phi.dim
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(phi.fn(mesh), dtype=float)
    phase = np.zeros(vals.shape)
    for i, ki in enumerate(k):
        phase = phase + ki * mesh[..., i]
    return complex(np.sum(vals * np.exp(-2j * math.pi * phase)) / Q ** phi.dim)


def _grid_spectrum(phi: Observable, Q: int) -> np.ndarray:
    """All Fourier coefficients at once from an FFT of the sample grid."""
    if phi.dim == 1:
        xs = np.arange(Q) / Q
        vals = np.asarray(phi.fn(xs), dtype=float)
        return np.fft.fft(vals) / Q
    axes = [np.arange(Q) / Q] * phi.dim
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(phi.fn(mesh), dtype=float)
    return np.fft.fftn(vals) / Q ** phi.dim


def approximate(phi: Observable, n: int, quad_points: Optional[int] = None) -> TrigPoly:
    """Degree-<=n smoothing: multiply phi's coefficients by the kernel's.

    Coefficients of phi come from one FFT over a grid of `quad_points` per
    axis (default 8*n*dim), identical to per-k quadrature on that grid.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    Q = quad_points or 8 * n * phi.dim
    kern = jackson_d(n, phi.dim) if phi.dim > 1 else jackson(n)
    spec = _grid_spectrum(phi, Q)
    coeffs = {}
    for k, jc in kern.coeffs.items():
        idx = tuple(i % Q for i in k)
        coeffs[k] = complex(spec[idx]) * jc
    return TrigPoly(dim=phi.dim, coeffs=coeffs)


@dataclass
class DecayReport:
    max_ratio: float
    argmax_k: tuple
    k_max: int
    ratios_checked: int


def fc_decay_check(phi: Observable, k_max: int,
                   quad_points: Optional[int] = None) -> DecayReport:
    """Max over 2 <= |k| <= k_max of |phi_hat(k)| / (norm_est * w(1/|k|))."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    Q = quad_points or max(8 * k_max, 64)
    spec = _grid_spectrum(phi, Q)
    w = phi.modulus
    worst = 0.0
    argmax = (0,) * phi.dim
    checked = 0
    if phi.dim == 1:
        for k in range(2, k_max + 1):
            for kk in (k, -k):
                ratio = abs(spec[kk % Q]) / (phi.norm_est * w(1.0 / k))
                checked += 1
                if ratio > worst:
                    worst, argmax = ratio, (kk,)
    else:
        import itertools

        rng = range(-k_max, k_max + 1)
        for k in itertools.product(*([rng] * phi.dim)):
            kn = max(abs(i) for i in k)
            if kn < 2:
                continue
            idx = tuple(i % Q for i in k)
            ratio = abs(spec[idx]) / (phi.norm_est * w(1.0 / kn))
            checked += 1
            if ratio > worst:
                worst, argmax = ratio, k
    return DecayReport(max_ratio=worst, argmax_k=argmax, k_max=k_max,
                       ratios_checked=checked)
