"""Config-driven experiment runner with deterministic, atomic outputs.

A run reads one JSON document, fills in per-experiment defaults, and writes
into ``out``:

* ``samples.jsonl``: one record per sample,
* ``aggregate.csv``: RFC 4180 table whose columns are listed in the manifest,
* ``manifest.json``: effective config, its sha256 digest, CSV columns and
  figure files,
* ``summary.json``: headline numbers and verdicts,
* ``figures/*.png`` unless figures are disabled.

Everything is first written to a temporary sibling directory and renamed
into place, so a failed run leaves nothing behind.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import re
import shutil
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .circle import ArcSet, ball, parse_arcset
from .entropy import (
    CirclePartition,
    analytic_entropies,
    lyapunov_estimate,
    metric_entropy_estimate,
    variational_check,
)
from .errors import CapabilityError, ConfigError, LabError
from .generators import SemigroupSystem
from .hitting import hitting_equality_check, jenkinson_window
from .recurrence import (
    action_ball_return_time,
    cesaro_kac,
    dynball_return_ratio,
    geometric_grid,
    recurrence_rate,
    return_time_samples,
    rotation_ball_bound_check,
    sample_rational_point,
    set_return_time,
    summarize_times,
)
from .sampling import BLOCK, SCALE
from .symbols import BernoulliWalk, PeriodicMixture, SymbolStream, parse_walk

X_DENOMINATOR = 2**32 - 1


# -- records ------------------------------------------------------------------


def fmt_number(x) -> Any:
    """JSON-friendly rendering: exact rationals as ``"p/q"`` strings, floats as floats."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if hasattr(x, "angle"):
        return f"sin2({x.angle})"
    return float(x)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class Result:
    experiment: str
    records: list[dict] | Callable[[], Any]
    columns: list[str]
    rows: list[dict]
    verdicts: list[Verdict]
    summary: dict
    plot: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def iter_records(self):
        return self.records() if callable(self.records) else iter(self.records)


def sample_record(experiment, seed, stream_id, x, omega_mode, value, censored, delta=None, n=None) -> dict:
    rec = {"experiment": experiment, "seed": seed, "stream_id": int(stream_id), "x": fmt_number(x), "omega_mode": omega_mode}
    if delta is not None:
        rec["delta"] = fmt_number(delta)
    if n is not None:
        rec["n"] = int(n)
    rec["value"] = fmt_number(value)
    rec["censored"] = bool(censored)
    return rec


def stream_span(ids) -> str:
    ids = sorted(set(int(i) for i in ids))
    if not ids:
        return ""
    if ids == list(range(ids[0], ids[-1] + 1)) and len(ids) > 2:
        return f"{ids[0]}-{ids[-1]}"
    return ";".join(map(str, ids))


# -- config -----------------------------------------------------------------------

DEFAULTS: dict[str, dict] = {
    "kac": {"system": "linear:2", "walk": "bernoulli:1", "A": "[0,1/2)", "M": 100_000, "N_max": 10_000,
            "omega_mode": "annealed"},
    "cesaro-kac": {"system": "linear:2,linear:3", "walk": "symmetric:2", "A": "[0,1/4)", "K": 200, "M": 10_000,
                   "N_max": 10_000},
    "recurrence": {"system": "linear:2,linear:3", "walk": "symmetric:2", "A": "[0,1/10)", "M": 100_000,
                   "N_max": 1000, "shift": 0},
    "set-return": {"system": "linear:2,linear:3", "walk": "symmetric:2", "A": "[1/10,1/5)", "M_omega": 100,
                   "N_max": 1000},
    "ball-return": {"system": "linear:2,linear:3", "delta": {"delta0": "1/65536", "ratio": "1/2", "count": 1},
                    "M": 100, "K_max": 60},
    "rate": {"system": "linear:2,linear:3", "walk": "symmetric:2",
             "delta": {"delta0": "1/10", "ratio": "1/2", "count": 13}, "M": 200, "N_max": 200},
    "dynball": {"system": "linear:2,linear:3", "walk": "symmetric:2", "delta": "1/100", "n_grid": [25, 50, 100, 200],
                "M": 50},
    "entropy": {"system": "linear:2,linear:3", "walk": "symmetric:2", "beta": 2, "n_grid": [4, 6, 8, 10, 12, 14],
                "M_omega": 500},
    "lyapunov": {"system": "linear:2,linear:3", "walk": "bernoulli:1/4,3/4", "n": 10_000, "M": 1000, "dim": 1},
    "variational": {"system": "linear:2,linear:3", "walk": "symmetric:2", "beta": 2,
                    "n_grid": [4, 6, 8, 10, 12, 14], "M_omega": 500},
    "hitting": {"system": "logistic,linear:2", "walk": "mixture:1=1/3,2=2/3", "n": 2, "ell": "8/25", "L": 12},
    "rotation-bound": {"alphas": ["1/3", "1/5"], "delta": {"delta0": "1/10", "ratio": "1/2", "count": 4}, "M": 8},
}

COMMON = {"experiment", "seed", "workers", "out", "figures"}
POSITIVE = {"M", "M_omega", "K", "n", "N_max", "L", "K_max", "dim"}
#: fields that never change results and are left out of the digest
VOLATILE = {"workers", "out", "figures"}


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_config(path: str | os.PathLike) -> tuple[dict, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", line=1)
    return raw, text


def _fraction(value, key, text):
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a number or p/q, got {value!r}", key, _line_of(text, key)) from None


def validate(raw: dict, text: str | None = None) -> dict:
    """Fill defaults and check every field; returns the effective config."""
    err = lambda msg, key: ConfigError(msg, key, _line_of(text, key))
    name = raw.get("experiment")
    if name not in DEFAULTS:
        raise err(f"unknown experiment {name!r}; expected one of {', '.join(DEFAULTS)}", "experiment")
    if "seed" not in raw:
        raise ConfigError("seed is required", "seed")
    seed = raw["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise err(f"seed must be a non-negative integer, got {seed!r}", "seed")
    cfg = dict(DEFAULTS[name])
    unknown = set(raw) - set(cfg) - COMMON
    if unknown:
        key = sorted(unknown)[0]
        raise err(f"unknown field for experiment {name!r}", key)
    cfg.update(raw)
    cfg.setdefault("workers", 1)
    cfg.setdefault("figures", True)
    for key in POSITIVE & set(cfg):
        v = cfg[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise err(f"must be a positive integer, got {v!r}", key)
    if not isinstance(cfg["workers"], int) or cfg["workers"] < 1:
        raise err("must be a positive integer", "workers")
    if cfg.get("shift", 0) < 0:
        raise err("must be non-negative", "shift")

    # parse the structured fields now so that errors surface before any work
    parsed = {}
    if "system" in cfg:
        try:
            parsed["system"] = SemigroupSystem.parse(cfg["system"])
        except ValueError as exc:
            raise err(str(exc), "system") from None
    if "walk" in cfg:
        try:
            parsed["walk"] = parse_walk(cfg["walk"])
        except (ValueError, ZeroDivisionError) as exc:
            raise err(str(exc), "walk") from None
        walk, system = parsed["walk"], parsed.get("system")
        if isinstance(walk, BernoulliWalk) and system is not None and walk.p != system.p:
            raise err(f"walk has {walk.p} symbols but the system has {system.p} generators", "walk")
        if isinstance(walk, (SymbolStream, PeriodicMixture)) and system is not None:
            symbols = set(walk.tail) if isinstance(walk, SymbolStream) else {s for w, _ in walk.components for s in w}
            if max(symbols) > system.p:
                raise err(f"walk uses symbol {max(symbols)} but the system has {system.p} generators", "walk")
    if "A" in cfg:
        try:
            parsed["A"] = parse_arcset(cfg["A"])
        except ValueError as exc:
            raise err(str(exc), "A") from None
        if parsed["A"].length <= 0 and name in {"kac", "cesaro-kac", "recurrence"}:
            raise err("needs a set of positive length", "A")
        if not parsed["A"]:
            raise err("set must be non-empty", "A")
    if "delta" in cfg:
        d = cfg["delta"]
        if isinstance(d, dict):
            extra = set(d) - {"delta0", "ratio", "count"}
            if extra:
                raise err(f"unknown delta keys {sorted(extra)}", "delta")
            try:
                grid = geometric_grid(_fraction(d.get("delta0", "1/10"), "delta", text),
                                      _fraction(d.get("ratio", "1/2"), "delta", text), int(d.get("count", 12)))
            except ValueError as exc:
                raise err(str(exc), "delta") from None
        elif isinstance(d, list):
            grid = [_fraction(v, "delta", text) for v in d]
        else:
            grid = [_fraction(d, "delta", text)]
        if any(v <= 0 for v in grid) or not grid:
            raise err("radii must be positive", "delta")
        parsed["deltas"] = grid
    if "n_grid" in cfg:
        g = cfg["n_grid"]
        if not isinstance(g, list) or not g or any(not isinstance(v, int) or v < 1 for v in g):
            raise err("must be a non-empty list of positive integers", "n_grid")
    if "beta" in cfg:
        b = cfg["beta"]
        try:
            parsed["beta"] = (CirclePartition.uniform(b) if isinstance(b, int)
                              else CirclePartition.from_cuts([_fraction(c, "beta", text) for c in b]))
        except (ValueError, TypeError) as exc:
            raise err(f"beta must be a cell count or a list of cut points ({exc})", "beta") from None
    if "ell" in cfg:
        parsed["ell"] = _fraction(cfg["ell"], "ell", text)
        if not 0 < parsed["ell"] < 1:
            raise err("must lie in (0, 1)", "ell")
    if "alphas" in cfg:
        parsed["alphas"] = [_fraction(a, "alphas", text) for a in cfg["alphas"]]
        if any(not 0 < a < 1 for a in parsed["alphas"]) or not parsed["alphas"]:
            raise err("rotation numbers must lie in (0, 1)", "alphas")
    if cfg.get("omega_mode", "annealed") not in {"annealed", "quenched"}:
        raise err("must be 'annealed' or 'quenched'", "omega_mode")

    _check_capabilities(name, cfg, parsed, text)
    cfg["_parsed"] = parsed
    return cfg


def _check_capabilities(name, cfg, parsed, text):
    system = parsed.get("system")
    walk = parsed.get("walk")
    needs_linear = {"kac", "cesaro-kac", "recurrence", "rate", "dynball", "entropy", "variational", "ball-return"}
    if name in needs_linear and not system.all_linear:
        raise ConfigError(f"experiment {name!r} needs linear:k generators, got {system.spec}", "system",
                          _line_of(text, "system"))
    if name in {"entropy", "variational", "lyapunov", "rate", "cesaro-kac"} and not isinstance(walk, BernoulliWalk):
        if not (name in {"cesaro-kac", "rate", "entropy"} and isinstance(walk, SymbolStream)):
            raise ConfigError(f"experiment {name!r} needs a bernoulli walk", "walk", _line_of(text, "walk"))
    if name in {"kac", "recurrence", "set-return", "dynball"} and isinstance(walk, PeriodicMixture):
        raise ConfigError(f"experiment {name!r} takes a bernoulli walk or a cyclic sequence", "walk",
                          _line_of(text, "walk"))
    if name == "hitting" and not isinstance(walk, PeriodicMixture):
        raise ConfigError("hitting needs a mixture:word=weight,... walk", "walk", _line_of(text, "walk"))


def canonical_json(cfg: dict) -> str:
    clean = {k: v for k, v in cfg.items() if not k.startswith("_") and k not in VOLATILE}
    return json.dumps(clean, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_digest(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


# -- experiments ----------------------------------------------------------------------


def _omega_label(walk) -> str:
    return walk.mode if isinstance(walk, SymbolStream) else f"annealed:{walk!r}"


def _mc_records(name, seed, times, starts, mode, block=BLOCK, offset=0):
    def gen():
        for i, (t, m) in enumerate(zip(times.tolist(), starts.tolist())):
            yield {"experiment": name, "seed": seed, "stream_id": offset + i // block, "x": m / SCALE,
                   "omega_mode": mode, "value": t if t else None, "censored": not t}
    return gen


def run_kac(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system, walk, A = p["system"], p["walk"], p["A"]
    if cfg["omega_mode"] == "quenched" and isinstance(walk, BernoulliWalk):
        walk = SymbolStream.sampled(walk, seed, 0)
    times, starts = return_time_samples(system, walk, A, cfg["M"], cfg["N_max"], seed, workers, with_starts=True)
    est = summarize_times(times, cfg["N_max"], 1 / float(A.length))
    lo, hi = 0.98 * est.target, 1.02 * est.target
    verdicts = [
        Verdict("kac-mean", lo <= est.mean <= hi, f"mean {est.mean:.5f} in [{lo:.4f}, {hi:.4f}]"),
        Verdict("kac-lower-bound", est.mean >= 1, f"mean {est.mean:.5f} >= 1"),
    ]
    row = {"stream_ids": stream_span(range(len(range(0, cfg["M"], BLOCK)))), "samples": est.samples,
           "censored": est.censored, "mean": est.mean, "half_width": est.half_width, "target": est.target,
           "defect_bound": est.defect_bound}
    return Result("kac", _mc_records("kac", seed, times, starts, _omega_label(walk)), list(row), [row], verdicts,
                  {"mean": est.mean, "half_width": est.half_width, "target": est.target,
                   "censored": est.censored, "defect_bound": est.defect_bound},
                  {"times": times})


def run_cesaro(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    res = cesaro_kac(p["system"], p["walk"], p["A"], cfg["K"], cfg["M"], cfg["N_max"], seed, 0, workers)
    mode = res.stream.mode
    records = [sample_record("cesaro-kac", seed, j, None, mode, float(v), False, n=j) for j, v in enumerate(res.per_shift)]
    rows = [{"shift": j, "stream_ids": str(j), "kac_integral": float(v), "half_width": float(h),
             "cesaro_mean": float(res.partial_means[j]) if j < cfg["K"] else None}
            for j, (v, h) in enumerate(zip(res.per_shift, res.half_widths))]
    lo, hi = 0.9625 * res.target, 1.0375 * res.target
    verdicts = [Verdict("cesaro-kac-final", lo <= res.final <= hi, f"final {res.final:.4f} in [{lo:.4f}, {hi:.4f}]")]
    return Result("cesaro-kac", records, list(rows[0]), rows, verdicts,
                  {"final": res.final, "unaveraged": res.unaveraged, "target": res.target, "censored": res.censored},
                  {"partial": res.partial_means, "per_shift": res.per_shift, "target": res.target})


def run_recurrence(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    walk = p["walk"]
    if isinstance(walk, SymbolStream):
        walk = walk.shift(cfg["shift"])
    times, starts = return_time_samples(p["system"], walk, p["A"], cfg["M"], cfg["N_max"], seed, workers,
                                        with_starts=True)
    returned = int((times > 0).sum())
    frac = returned / cfg["M"]
    row = {"stream_ids": stream_span(range(len(range(0, cfg["M"], BLOCK)))), "samples": cfg["M"],
           "returned": returned, "fraction": frac, "N_max": cfg["N_max"], "shift": cfg["shift"]}
    verdicts = [Verdict("recurrence-fraction", frac >= 0.999, f"fraction {frac:.6f} >= 0.999")]
    return Result("recurrence", _mc_records("recurrence", seed, times, starts, _omega_label(walk)), list(row), [row],
                  verdicts, {"fraction": frac, "returned": returned}, {"times": times})


def run_set_return(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    walk, A = p["walk"], p["A"]
    streams = [walk] if isinstance(walk, SymbolStream) else [SymbolStream.sampled(walk, seed, i) for i in range(cfg["M_omega"])]
    records, values = [], []
    for i, st in enumerate(streams):
        t = set_return_time(p["system"], st, A, cfg["N_max"])
        values.append(t)
        records.append(sample_record("set-return", seed, i, None, st.mode, t, t is None))
    ok = [t for t in values if t is not None]
    row = {"stream_ids": stream_span(range(len(streams))), "samples": len(streams), "censored": len(values) - len(ok),
           "min": min(ok) if ok else None, "mean": float(np.mean(ok)) if ok else None, "max": max(ok) if ok else None}
    verdicts = [Verdict("set-return-finite", len(ok) == len(values), f"{len(ok)}/{len(values)} streams returned")]
    return Result("set-return", records, list(row), [row], verdicts, dict(row), {"values": ok})


def run_ball_return(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system = p["system"]
    bound = 1 / math.log(min(system.degrees)) + 0.05
    records, rows, worst = [], [], 0.0
    for i in range(cfg["M"]):
        x = sample_rational_point(seed, i, X_DENOMINATOR)
        for d in p["deltas"]:
            t = action_ball_return_time(system, x, d, cfg["K_max"])
            records.append(sample_record("ball-return", seed, i, x, "all-words", t, t is None, delta=d))
            ratio = math.inf if t is None else t / -math.log(d)
            worst = max(worst, ratio)
            rows.append({"stream_ids": str(i), "x": str(x), "delta": str(d), "T": t, "ratio": ratio})
    verdicts = [Verdict("ball-return-upper", worst <= bound, f"max T/(-log delta) {worst:.4f} <= {bound:.4f}")]
    return Result("ball-return", records, list(rows[0]), rows, verdicts, {"max_ratio": worst, "bound": bound},
                  {"rows": rows})


def run_rate(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system, walk = p["system"], p["walk"]
    rep = recurrence_rate(system, walk, p["deltas"], cfg["M"], seed, cfg["N_max"], X_DENOMINATOR, workers)
    records, rows = [], []
    for e in rep.estimates:
        mode = walk.mode if isinstance(walk, SymbolStream) else SymbolStream.sampled(walk, seed, e.stream_id).mode
        for d, t in e.grid:
            records.append(sample_record("rate", seed, e.stream_id, e.x, mode, t, t is None, delta=d))
        rows.append({"stream_ids": str(e.stream_id), "x": str(e.x), "slope": e.slope, "intercept": e.intercept,
                     "r2": e.r2, "dropped": e.dropped})
    lo, hi = 1 / math.log(max(system.degrees)) - 0.05, 1 / math.log(min(system.degrees)) + 0.05
    slopes = rep.slopes
    inside = int(((slopes >= lo) & (slopes <= hi)).sum())
    verdicts = [Verdict("rate-sandwich", inside == slopes.size, f"{inside}/{slopes.size} slopes in [{lo:.4f}, {hi:.4f}]")]
    if rep.analytic is not None:
        a_lo, a_hi = 0.95 * rep.analytic, 1.05 * rep.analytic
        verdicts.insert(0, Verdict("rate-mean", a_lo <= rep.mean <= a_hi,
                                   f"mean slope {rep.mean:.4f} in [{a_lo:.4f}, {a_hi:.4f}]"))
    summary = {"mean": rep.mean, "std": rep.std, "analytic": rep.analytic, **rep.quantiles,
               "censored_points": int(sum(e.dropped for e in rep.estimates))}
    return Result("rate", records, list(rows[0]), rows, verdicts, summary,
                  {"estimates": rep.estimates, "analytic": rep.analytic})


def run_dynball(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system, walk = p["system"], p["walk"]
    delta = p["deltas"][0]
    records, ratios = [], {n: [] for n in cfg["n_grid"]}
    for i in range(cfg["M"]):
        st = walk if isinstance(walk, SymbolStream) else SymbolStream.sampled(walk, seed, i)
        x = sample_rational_point(seed, i, X_DENOMINATOR)
        for n, t, r in dynball_return_ratio(system, st, x, delta, cfg["n_grid"]):
            records.append(sample_record("dynball", seed, i, x, st.mode, t, t is None, delta=delta, n=n))
            ratios[n].append(r)
    rows = []
    for n, rs in ratios.items():
        rs = np.array(rs)
        rows.append({"n": n, "stream_ids": stream_span(range(cfg["M"])), "mean_ratio": float(np.nanmean(rs)),
                     "median_ratio": float(np.nanmedian(rs)),
                     "fraction_in_band": float(((rs >= 1) & (rs <= 1.2)).mean())})
    last = rows[-1]
    verdicts = [Verdict("dynball-ratio", last["fraction_in_band"] >= 0.9,
                        f"{last['fraction_in_band']:.3f} of ratios at n={last['n']} in [1, 1.2] (need 0.9)")]
    return Result("dynball", records, list(rows[0]), rows, verdicts, {"rows": rows}, {"ratios": ratios})


def run_entropy(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system, walk = p["system"], p["walk"]
    rep = metric_entropy_estimate(system, walk, p["beta"], cfg["n_grid"], cfg["M_omega"], seed, workers)
    ids = stream_span(range(rep.samples))
    rows = [{"n": r["n"], "stream_ids": ids, "value": r["value"], "half_width": r["half_width"]} for r in rep.rows()]
    mode = walk.mode if isinstance(walk, SymbolStream) else f"sampled:{walk!r}"
    records = [sample_record("entropy", seed, 0, None, mode, r["value"], False, n=r["n"]) for r in rows]
    verdicts = []
    summary = {"h_est": rep.limit, "half_width": rep.half_width}
    if isinstance(walk, BernoulliWalk):
        an = analytic_entropies(system, walk)
        summary["analytic"] = an.quenched_pressure
        verdicts.append(Verdict("entropy-limit", abs(rep.limit - an.quenched_pressure) <= 0.05,
                                f"|{rep.limit:.4f} - {an.quenched_pressure:.4f}| <= 0.05"))
    return Result("entropy", records, list(rows[0]), rows, verdicts, summary,
                  {"report": rep, "analytic": summary.get("analytic")})


def run_lyapunov(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    est = lyapunov_estimate(p["system"], p["walk"], cfg["n"], cfg["M"], seed, workers, cfg["dim"])
    row = {"stream_ids": stream_span(range(len(range(0, cfg["M"], 256)))), "samples": est.samples,
           "dropped": est.dropped, "value": est.value, "half_width": est.half_width, "analytic": est.analytic}
    records = [sample_record("lyapunov", seed, 0, None, f"annealed:{p['walk']!r}", est.value, False, n=cfg["n"])]
    verdicts = []
    if est.analytic is not None:
        verdicts.append(Verdict("lyapunov-analytic", abs(est.value - est.analytic) <= 0.01,
                                f"|{est.value:.5f} - {est.analytic:.5f}| <= 0.01"))
    return Result("lyapunov", records, list(row), [row], verdicts, dict(row), {"estimate": est})


def run_variational(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    system, walk = p["system"], p["walk"]
    est = metric_entropy_estimate(system, walk, p["beta"], cfg["n_grid"], cfg["M_omega"], seed, workers)
    rep = variational_check(system, walk, estimate=est.limit)
    an = analytic_entropies(system, walk)
    rows = [{"quantity": q, "value": v, "stream_ids": stream_span(range(est.samples)) if q == "estimate" else ""}
            for q, v in rep.chain]
    rows += [{"quantity": k, "value": getattr(an, k), "stream_ids": ""} for k in ("htop_skew", "htop_action", "shift_entropy")]
    records = [sample_record("variational", seed, 0, None, f"sampled:{walk!r}", est.limit, False)]
    detail = " <= ".join(f"{v:.4f}" for _, v in rep.chain) + f" (estimate step allows {rep.tolerance} slack)"
    verdicts = [Verdict("variational-chain", rep.holds, detail)]
    return Result("variational", records, ["quantity", "value", "stream_ids"], rows, verdicts,
                  {"chain": rep.chain, "margins": rep.margins}, {"chain": rep.chain})


def run_hitting(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    rep = hitting_equality_check(p["system"], p["walk"], cfg["n"], p["ell"], cfg["L"], seed=seed)
    rows = []
    for word, x0 in rep.witnesses:
        num, den = (x0.angle.numerator, x0.angle.denominator) if hasattr(x0, "angle") else (x0.numerator, x0.denominator)
        rows.append({"n": cfg["n"], "ell": str(rep.ell), "gamma_est": str(rep.gamma), "alpha_est": str(rep.alpha),
                     "witness_word": "".join(map(str, word)), "witness_point_num": num, "witness_point_den": den,
                     "point_kind": "sin2-angle" if hasattr(x0, "angle") else "rational", "stream_ids": "0"})
    records = [sample_record("hitting", seed, 0, x, repr(p["walk"]), w, False, n=cfg["n"]) for x, w in rep.marginal]
    win = jenkinson_window(cfg["n"])
    verdicts = [Verdict("hitting-equality", rep.holds, f"gamma {rep.gamma} alpha {rep.alpha} target {rep.target}")]
    summary = {"gamma": fmt_number(rep.gamma), "alpha": fmt_number(rep.alpha), "target": str(rep.target),
               "ell": str(rep.ell), "window_doubling": [str(v) for v in win.doubling],
               "window_logistic": list(win.logistic), "marginal": [[fmt_number(x), str(w)] for x, w in rep.marginal]}
    return Result("hitting", records, list(rows[0]) if rows else ["n"], rows, verdicts, summary, {"report": rep})


def run_rotation(cfg, workers) -> Result:
    p, seed = cfg["_parsed"], cfg["seed"]
    xs = [sample_rational_point(seed, i, X_DENOMINATOR) for i in range(cfg["M"])]
    rep = rotation_ball_bound_check(p["alphas"], p["deltas"], xs)
    rows, records = [], []
    for k, r in enumerate(rep.rows):
        i = k // len(p["deltas"])
        rows.append({"stream_ids": str(i), "x": str(r["x"]), "delta": str(r["delta"]), "T": r["T"],
                     "bound": r["bound"], "holds": r["holds"]})
        records.append(sample_record("rotation-bound", seed, i, r["x"], "all-words", r["T"], r["T"] is None,
                                     delta=r["delta"]))
    verdicts = [Verdict("rotation-bound", rep.holds, f"{sum(r['holds'] for r in rep.rows)}/{len(rep.rows)} balls")]
    return Result("rotation-bound", records, list(rows[0]), rows, verdicts, {"holds": rep.holds}, {"rows": rows})


RUNNERS: dict[str, Callable[[dict, int], Result]] = {
    "kac": run_kac,
    "cesaro-kac": run_cesaro,
    "recurrence": run_recurrence,
    "set-return": run_set_return,
    "ball-return": run_ball_return,
    "rate": run_rate,
    "dynball": run_dynball,
    "entropy": run_entropy,
    "lyapunov": run_lyapunov,
    "variational": run_variational,
    "hitting": run_hitting,
    "rotation-bound": run_rotation,
}


# -- output -----------------------------------------------------------------------


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n", extrasaction="raise")
    w.writeheader()
    for row in rows:
        w.writerow({k: "" if row.get(k) is None else row[k] for k in columns})
    return buf.getvalue()


def _prepare_out(out: Path) -> Path:
    if out.exists():
        if not out.is_dir():
            raise ConfigError(f"output path {out} exists and is not a directory", "out")
        if any(out.iterdir()) and not (out / "manifest.json").exists():
            raise ConfigError(f"output directory {out} is not empty and holds no earlier run", "out")
    out.parent.mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix=f".{out.name}-", dir=out.parent))


def write_outputs(result: Result, cfg: dict, out: Path, figures: bool = True) -> dict:
    tmp = _prepare_out(out)
    try:
        with open(tmp / "samples.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for rec in result.iter_records():
                fh.write(json.dumps(rec, separators=(",", ":"), ensure_ascii=False))
                fh.write("\n")
        (tmp / "aggregate.csv").write_text(_csv_text(result.columns, result.rows), encoding="utf-8", newline="")
        files = []
        if figures:
            from .plots import render

            files = render(result, tmp / "figures")
        manifest = {
            "tool": "semigroup-lab",
            "version": __version__,
            "experiment": result.experiment,
            "config": json.loads(canonical_json(cfg)),
            "config_digest": config_digest(cfg),
            "csv": {"file": "aggregate.csv", "columns": result.columns},
            "jsonl": {"file": "samples.jsonl",
                      "fields": ["experiment", "seed", "stream_id", "x", "omega_mode", "delta", "n", "value", "censored"]},
            "figures": [str(Path("figures") / f.name) for f in files],
        }
        summary = {"experiment": result.experiment, "config_digest": manifest["config_digest"],
                   "passed": result.passed, "verdicts": [v.__dict__ for v in result.verdicts],
                   "summary": _jsonable(result.summary)}
        (tmp / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (tmp / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if out.exists():
            shutil.rmtree(out)
        os.replace(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return manifest


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (Fraction, np.integer, np.floating)) or hasattr(obj, "angle"):
        return fmt_number(obj)
    return obj


def run(config: dict | str | os.PathLike, seed: int | None = None, out: str | os.PathLike | None = None,
        workers: int | None = None, figures: bool | None = None) -> Result:
    """Validate, execute and (when an output directory is known) write one experiment.

    Keyword arguments override the matching config fields.
    """
    text = None
    if not isinstance(config, dict):
        config, text = load_config(config)
    raw = dict(config)
    for key, value in (("seed", seed), ("out", out), ("workers", workers), ("figures", figures)):
        if value is not None:
            raw[key] = str(value) if key == "out" else value
    cfg = validate(raw, text)
    try:
        result = RUNNERS[cfg["experiment"]](cfg, cfg["workers"])
    except CapabilityError as exc:
        raise ConfigError(str(exc), "system") from None
    result.summary = {**result.summary, "config_digest": config_digest(cfg)}
    if cfg.get("out"):
        write_outputs(result, cfg, Path(cfg["out"]), bool(cfg["figures"]))
    return result
