"""Experiment configuration, sweep orchestration and CSV/JSON emission.

Config files are flat key = value text (see CONFIG_GRAMMAR).  Identical
configs produce identical output bytes: iteration order is fixed, floats are
emitted with shortest round-trip repr, and wall-clock timings only enter the
CSV when explicitly enabled.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import sharpness
from .arithmetic import Frequency, expand_cf, find_convergent_at_scale
from .dynamics import (SystemSpec, TorusPoint, char_birkhoff_skew, kernel_sum,
                       sup_deviation)
from .envelopes import Envelope, fit_scale, weyl_bound
from .errors import ConfigError, Timeout
from .kernels import (Holder, Observable, make_dist_pow, make_observable,
                      make_separable, random_real_trigpoly)
from .sharpness import AnalyticWeight, HolderWeight, build_lacunary

CONFIG_GRAMMAR = """\
Config grammar (one pair per line):

    key = value          # trailing comments allowed
    # full-line comment

Keys are [a-z_][a-z0-9_]* strings.  Values are typed by shape:
    123                  -> int
    1.5e-3               -> float
    true / false         -> bool
    [v1, v2, ...]        -> list of the above
    anything else        -> string (quotes optional, stripped)
Unknown keys are carried through untouched; serialization orders keys
alphabetically, so parse(serialize(cfg)) == cfg.
"""


def _parse_scalar(text: str):
    t = text.strip()
    if t.startswith('"') and t.endswith('"') and len(t) >= 2:
        return t[1:-1]
    if t in ("true", "false"):
        return t == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def _format_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        needs_quote = v != v.strip() or v in ("true", "false") or "," in v
        try:
            float(v)
            needs_quote = True
        except ValueError:
            pass
        return f'"{v}"' if needs_quote else v
    return str(v)


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def require(self, key: str):
        if key not in self.values:
            raise ConfigError(f"missing required config key {key!r}")
        return self.values[key]

    def serialize(self) -> str:
        lines = []
        for key in sorted(self.values):
            v = self.values[key]
            if isinstance(v, list):
                body = "[" + ", ".join(_format_scalar(x) for x in v) + "]"
            else:
                body = _format_scalar(v)
            lines.append(f"{key} = {body}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]

    @staticmethod
    def parse(text: str) -> "ExperimentConfig":
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, _, body = line.partition("=")
            key = key.strip()
            body = body.strip()
            if not key.isidentifier():
                raise ConfigError(f"line {lineno}: bad key {key!r}")
            if body.startswith("[") and body.endswith("]"):
                inner = body[1:-1].strip()
                values[key] = (
                    [_parse_scalar(x) for x in inner.split(",")] if inner else []
                )
            else:
                values[key] = _parse_scalar(body)
        return ExperimentConfig(values)

    @staticmethod
    def load(path) -> "ExperimentConfig":
        return ExperimentConfig.parse(Path(path).read_text())


# ---------------------------------------------------------------------------
# resolution: systems, observables, schedules
# ---------------------------------------------------------------------------


def resolve_system(text: str, bits: int = 192) -> SystemSpec:
    """"rotation1d:<freq>", "rotationd:<freq>,<freq>,..." or "skew:<d>:<freq>"."""
    kind, _, body = text.partition(":")
    if kind == "rotation1d":
        return SystemSpec.rotation(Frequency.parse(body, bits), bits)
    if kind == "rotationd":
        freqs = [Frequency.parse(p, bits) for p in body.split(",")]
        return SystemSpec.rotation_d(freqs, bits)
    if kind == "skew":
        d_text, _, freq_text = body.partition(":")
        return SystemSpec.skew(int(d_text), Frequency.parse(freq_text, bits), bits)
    raise ConfigError(f"unknown system {text!r}")


def resolve_observable(key: str, sys: SystemSpec) -> Observable:
    """Registry keys plus system-coupled constructions.

    lacunary:holder:<alpha>[:<tol>]   lacunary series on the system frequency
    lacunary:analytic[:<tol>]
    poly_plus_dist:<deg>:<alpha>:<seed>  fixed random trig poly + ||x_1||^alpha
    """
    if key.startswith("lacunary:"):
        parts = key.split(":")
        tol = 1e-12
        if parts[1] == "holder":
            weight = HolderWeight(float(parts[2]))
            if len(parts) > 3:
                tol = float(parts[3])
            target = _lacunary_reach(weight, tol)
        elif parts[1] == "analytic":
            weight = AnalyticWeight()
            if len(parts) > 2:
                tol = float(parts[2])
            target = 10 ** 12
        else:
            raise ConfigError(f"unknown lacunary weight {parts[1]!r}")
        cf = expand_cf(sys.freqs[0], max_q=target)
        return build_lacunary(cf, weight, tol=tol, bits=sys.bits)
    if key.startswith("poly_plus_dist:"):
        _, deg, alpha, seed = key.split(":")
        poly = random_real_trigpoly(sys.dim, int(deg), seed=int(seed), scale=0.25)
        dist = make_dist_pow(float(alpha), dim=1)
        return make_separable(
            sys.dim, poly, [(0, dist)], name=key, modulus=Holder(float(alpha)),
        )
    return make_observable(key, sys.dim)


def _lacunary_reach(weight: HolderWeight, tol: float) -> int:
    # tail ~ C * q^-alpha below tol/4 leaves margin for the doubling bound
    geo = 1.0 / (1.0 - 2.0 ** -weight.alpha)
    return int((8 * geo / tol) ** (1.0 / weight.alpha)) + 10


def resolve_schedule(text: str, sys: SystemSpec) -> list[int]:
    """"geometric:lo,hi,factor", "convergents:max_q", or "list:n1,n2,..."."""
    kind, _, body = text.partition(":")
    if kind == "geometric":
        lo_s, hi_s, f_s = body.split(",")
        lo, hi, f = float(lo_s), float(hi_s), float(f_s)
        if not (lo >= 1 and hi >= lo and f > 1):
            raise ConfigError(f"bad geometric schedule {text!r}")
        out = []
        x = lo
        while x <= hi * (1 + 1e-9):
            n = int(round(x))
            if not out or n > out[-1]:
                out.append(n)
            x *= f
        return out
    if kind == "convergents":
        cf = expand_cf(sys.freqs[0], max_q=int(body))
        return [int(q) for q in cf.q]
    if kind == "list":
        out = sorted({int(x) for x in body.split(",")})
        return out
    raise ConfigError(f"unknown schedule {text!r}")


# ---------------------------------------------------------------------------
# rate experiments
# ---------------------------------------------------------------------------


@dataclass
class RateSeries:
    points: list                 # (N, sup_dev), sorted by N
    fitted_slope: float
    envelope: Optional[Envelope]
    envelope_scale: float
    tail_ratio: float
    rows: list                   # CSV rows
    config_hash: str = ""

    def positive_points(self):
        return [(n, v) for n, v in self.points if v > 0]


class _BudgetClock:
    def __init__(self, budget_s: Optional[float]):
        self.budget = budget_s
        self.t0 = time.monotonic()

    def check(self, label: str):
        if self.budget is not None and time.monotonic() - self.t0 > self.budget:
            raise Timeout(f"{label} exceeded budget of {self.budget}s")

    def elapsed_ms(self) -> float:
        return 1000.0 * (time.monotonic() - self.t0)


def run_rate_experiment(cfg: ExperimentConfig) -> RateSeries:
    bits = int(cfg.get("precision_bits", 192))
    sys = resolve_system(cfg.require("system"), bits)
    phi = resolve_observable(cfg.require("observable"), sys)
    schedule = resolve_schedule(cfg.require("schedule"), sys)
    grid = int(cfg.get("grid", 1024 if sys.dim == 1 else 64))
    env = (Envelope.parse(cfg.values["envelope"])
           if "envelope" in cfg.values else None)
    timings = bool(cfg.get("timings", False))
    clock = _BudgetClock(cfg.get("budget_s"))

    points, rows = [], []
    for N in schedule:
        t0 = time.monotonic()
        res = sup_deviation(sys, phi, N, grid)
        wall = (time.monotonic() - t0) * 1000.0
        points.append((N, res.sup_dev))
        rows.append({
            "system": cfg.require("system"),
            "N": N,
            "grid": grid,
            "sup_dev": res.sup_dev,
            "argmax": ";".join(f"{v:.9f}" for v in res.argmax_x.to_floats()),
            "wall_ms": round(wall, 3) if timings else 0.0,
        })
        clock.check("rate experiment")

    pos = [(n, v) for n, v in points if v > 0]
    if len(pos) >= 2:
        slope = float(np.polyfit(np.log([n for n, _ in pos]),
                                 np.log([v for _, v in pos]), 1)[0])
    else:
        slope = math.nan
    scale, tail = (math.nan, math.nan)
    in_domain = [(n, v) for n, v in pos if n >= 3]  # envelope domain
    if env is not None and len(in_domain) >= 3:
        scale, tail = fit_scale(in_domain, env)
    series = RateSeries(
        points=points, fitted_slope=slope, envelope=env,
        envelope_scale=scale, tail_ratio=tail, rows=rows,
        config_hash=cfg.config_hash(),
    )
    _maybe_emit(cfg, "rate", rows, extra={
        "fitted_slope": slope, "envelope_scale": scale, "tail_ratio": tail,
    })
    return series


def run_kernel_experiment(cfg: ExperimentConfig) -> dict:
    """Sweep (q_n, N), recording sum_{1<=|k|<q} |E_N(k omega)| ratios."""
    bits = int(cfg.get("precision_bits", 192))
    freq_texts = cfg.require("frequencies")
    if isinstance(freq_texts, str):
        freq_texts = [freq_texts]
    N_list = [int(n) for n in cfg.require("n_values")]
    max_q = int(cfg.get("max_q", 6765))
    cap = float(cfg.get("ratio_cap", 10.0))
    clock = _BudgetClock(cfg.get("budget_s"))
    rows = []
    max_ratio = 0.0
    for ftext in freq_texts:
        omega = Frequency.parse(ftext, bits)
        cf = expand_cf(omega, max_q=max_q)
        for idx in range(1, cf.certified_len + 1):
            if cf.q_at(idx) < 2:
                continue
            for N in N_list:
                r = kernel_sum(omega, cf, idx, N)
                rows.append({
                    "frequency": ftext, "q": r.q, "N": r.N,
                    "sum": r.total, "ratio": r.ratio,
                })
                max_ratio = max(max_ratio, r.ratio)
                clock.check("kernel experiment")
    table = {"rows": rows, "max_ratio": max_ratio, "cap": cap,
             "within_cap": max_ratio <= cap,
             "config_hash": cfg.config_hash()}
    _maybe_emit(cfg, "kernel", rows, extra={"max_ratio": max_ratio, "cap": cap})
    return table


def run_sharpness_experiment(cfg: ExperimentConfig) -> dict:
    """Decomposition identity plus window and aggregate lower bounds."""
    bits = int(cfg.get("precision_bits", 192))
    omega = Frequency.parse(cfg.require("frequency"), bits)
    alpha = float(cfg.get("alpha", 0.5))
    weight_kind = cfg.get("weight", "holder")
    tol = float(cfg.get("tol", 1e-12))
    if weight_kind == "holder":
        weight = HolderWeight(alpha)
        reach = _lacunary_reach(weight, tol)
    elif weight_kind == "analytic":
        weight = AnalyticWeight()
        reach = 10 ** 12
    else:
        raise ConfigError(f"unknown weight {weight_kind!r}")
    cf = expand_cf(omega, max_q=reach)
    phi = build_lacunary(cf, weight, tol=tol, bits=bits)
    gap_c = float(cfg.get("gap_constant", 10.0))
    range_c = float(cfg.get("range_constant", 0.125))
    ratio_floor = float(cfg.get("ratio_floor", 0.1))
    l_cap = int(cfg.get("l_cap", 256))
    if "m_values" in cfg.values:
        ms = [int(m) for m in cfg.require("m_values")]
    else:
        witness_c = float(cfg.get("witness_constant", 1.0))
        ms = [m for m in sharpness.borel_bernstein_schedule(cf, witness_c)
              if 2 <= m < phi.n_modes]
    clock = _BudgetClock(cfg.get("budget_s"))
    reports = []
    for m in ms:
        entry = {"m": m, "q_m": phi.mode_q(m)}
        rep = sharpness.decompose(phi, m, TorusPoint.zero(1, bits), omega=omega)
        entry["identity_gap"] = rep.identity_gap
        entry["lower_dev_at_0"] = rep.lower_dev
        try:
            lb = sharpness.verify_lower_bound(
                phi, m, gap_constant=gap_c, range_constant=range_c,
                l_cap=l_cap, omega=omega,
            )
            nm = sharpness.verify_Nm_bound(phi, m, lower=lb, omega=omega)
            entry.update({
                "hypothesis": "ok",
                "min_ratio": lb.min_ratio,
                "l_bar": lb.l_bar,
                "N_m": nm.N_m,
                "ratio_Nm": nm.ratio,
                "passed": bool(lb.min_ratio > 0 and nm.ratio >= ratio_floor),
            })
        except sharpness.HypothesisNotMet as exc:
            entry.update({"hypothesis": f"not met: {exc}", "passed": None})
        reports.append(entry)
        clock.check("sharpness experiment")
    out = {"reports": reports, "config_hash": cfg.config_hash(),
           "n_modes": phi.n_modes, "tail_bound": phi.tail_bound}
    _maybe_emit(cfg, "sharp", reports, extra={"n_modes": phi.n_modes})
    return out


def run_skew_experiment(cfg: ExperimentConfig) -> dict:
    """Character-sum magnitudes against the Weyl envelope across N."""
    bits = int(cfg.get("precision_bits", 192))
    d = int(cfg.get("d", 2))
    omega = Frequency.parse(cfg.require("frequency"), bits)
    k = tuple(int(v) for v in cfg.require("k"))
    N_list = [int(n) for n in cfg.require("n_values")]
    eps = float(cfg.get("eps", 0.05))
    n_points = int(cfg.get("x_batch", 4))
    seed = int(cfg.get("seed", 7))
    clock = _BudgetClock(cfg.get("budget_s"))

    rng = np.random.default_rng(seed)
    xs = [TorusPoint.from_floats(rng.random(d), bits) for _ in range(n_points)]
    xs.append(TorusPoint.zero(d, bits))

    first = next(i for i, ki in enumerate(k) if ki)
    lead = omega.scale(k[first], math.factorial(d - first))
    lead_cf = expand_cf(lead, max_q=max(N_list) * 64)

    rows = []
    for N in N_list:
        best = 0.0
        for x in xs:
            res = char_birkhoff_skew(d, omega, k, x, N, bits)
            best = max(best, abs(res.value))
        _, q = find_convergent_at_scale(lead_cf, N)
        rows.append({
            "N": N, "q": q, "max_char_sum": best,
            "weyl_shape": weyl_bound(d, q, N, eps),
        })
        clock.check("skew experiment")
    shapes = [(r["N"], r["max_char_sum"] / r["weyl_shape"]) for r in rows]
    scale = max(v for _, v in shapes)
    tail = max(v for _, v in shapes[-max(1, len(shapes) // 3):]) / scale
    out = {"rows": rows, "scale": scale, "tail_ratio": tail, "d": d, "eps": eps,
           "config_hash": cfg.config_hash()}
    _maybe_emit(cfg, "skew", rows, extra={"scale": scale, "tail_ratio": tail})
    return out


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows: Sequence[dict], path) -> None:
    """Deterministic CSV: column order from the first row, repr floats."""
    path = Path(path)
    if not rows:
        path.write_text("")
        return
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in cols))
    path.write_text("\n".join(lines) + "\n")


def emit_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _maybe_emit(cfg: ExperimentConfig, kind: str, rows, extra: dict) -> None:
    out_dir = cfg.get("out_dir")
    if not out_dir:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = cfg.get("format", "csv")
    stem = f"{kind}-{cfg.config_hash()}"
    if fmt in ("csv", "both"):
        emit_csv(rows, out / f"{stem}.csv")
    if fmt in ("json", "both"):
        emit_json(rows, out / f"{stem}.json")
    manifest = {
        "kind": kind,
        "config": cfg.values,
        "config_hash": cfg.config_hash(),
        "summary": extra,
    }
    emit_json(manifest, out / f"{stem}-manifest.json")
