"""Static figures written next to the aggregate CSV (Agg backend, PNG)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _kac(result, d):
    times = result.plot["times"]
    ok = times[times > 0]
    fig, ax = plt.subplots(figsize=(6, 4))
    top = int(np.quantile(ok, 0.999)) + 1
    ax.hist(ok[ok <= top], bins=np.arange(0.5, top + 1.5), density=True, color="tab:blue")
    ax.set_yscale("log")
    ax.set_xlabel("first return time")
    ax.set_ylabel("frequency")
    ax.set_title(f"mean {ok.mean():.4f}")
    return [_save(fig, d / f"{result.experiment}_return_times.png")]


def _cesaro(result, d):
    p = result.plot
    fig, ax = plt.subplots(figsize=(6, 4))
    k = np.arange(1, len(p["partial"]) + 1)
    ax.plot(np.arange(len(p["per_shift"])), p["per_shift"], ".", ms=3, alpha=0.5, label="single shift")
    ax.plot(k - 1, p["partial"], "-", lw=2, label="Cesaro mean")
    ax.axhline(p["target"], color="k", ls="--", lw=1, label="1/Leb(A)")
    ax.set_xlabel("shift")
    ax.set_ylabel("mean return time")
    ax.legend()
    return [_save(fig, d / "cesaro_kac.png")]


def _rate(result, d):
    ests, analytic = result.plot["estimates"], result.plot["analytic"]
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
    for e in ests[:40]:
        pts = [(-math.log(dl), t) for dl, t in e.grid if t is not None]
        if pts:
            u, t = zip(*pts)
            a1.plot(u, t, "-", lw=0.6, alpha=0.6)
    a1.set_xlabel("-log delta")
    a1.set_ylabel("shortest return time")
    slopes = np.array([e.slope for e in ests if not e.censored])
    a2.hist(slopes, bins=30, color="tab:green")
    if analytic is not None:
        a2.axvline(analytic, color="k", ls="--", lw=1)
    a2.set_xlabel("slope")
    return [_save(fig, d / "rate.png")]


def _dynball(result, d):
    ratios = result.plot["ratios"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = sorted(ratios)
    ax.boxplot([np.array(ratios[n])[~np.isnan(ratios[n])] for n in ns], labels=[str(n) for n in ns])
    ax.axhline(1, color="k", lw=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel("T / n")
    return [_save(fig, d / "dynball.png")]


def _entropy(result, d):
    rep = result.plot["report"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(rep.n_grid, rep.values, yerr=rep.half_widths, fmt="o-")
    if result.plot.get("analytic") is not None:
        ax.axhline(result.plot["analytic"], color="k", ls="--", lw=1)
    ax.set_xlabel("n")
    ax.set_ylabel("H(join) / n")
    return [_save(fig, d / "entropy.png")]


def _bars(result, d):
    chain = result.plot["chain"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(chain)), [v for _, v in chain], tick_label=[k for k, _ in chain])
    ax.tick_params(axis="x", labelrotation=20)
    return [_save(fig, d / "variational.png")]


def _table(result, d, key, xcol, ycol, name):
    rows = result.plot[key]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [float(r[xcol]) if not isinstance(r[xcol], str) else float(eval_fraction(r[xcol])) for r in rows]
    ys = [r[ycol] if r[ycol] is not None else np.nan for r in rows]
    ax.plot(xs, ys, "o", ms=3)
    ax.set_xscale("log")
    ax.set_xlabel(xcol)
    ax.set_ylabel(ycol)
    return [_save(fig, d / name)]


def eval_fraction(text: str) -> float:
    num, _, den = text.partition("/")
    return float(num) / float(den or 1)


def _lyapunov(result, d):
    est = result.plot["estimate"]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar([0], [est.value], yerr=[est.half_width], fmt="o", label="estimate")
    if est.analytic is not None:
        ax.axhline(est.analytic, color="k", ls="--", lw=1, label="analytic")
    ax.set_xticks([])
    ax.legend()
    return [_save(fig, d / "lyapunov.png")]


def _hitting(result, d):
    rep = result.plot["report"]
    fig, ax = plt.subplots(figsize=(5, 4))
    vals = [float(rep.gamma or 0), float(rep.alpha or 0), float(rep.target)]
    ax.bar(["gamma", "alpha", "1/n"], vals, color=["tab:blue", "tab:orange", "tab:gray"])
    ax.set_ylim(0, 1)
    return [_save(fig, d / "hitting.png")]


def _set_return(result, d):
    vals = result.plot["values"]
    fig, ax = plt.subplots(figsize=(5, 4))
    if vals:
        ax.hist(vals, bins=np.arange(min(vals) - 0.5, max(vals) + 1.5))
    ax.set_xlabel("shortest return time")
    return [_save(fig, d / "set_return.png")]


RENDERERS = {
    "kac": _kac,
    "recurrence": _kac,
    "cesaro-kac": _cesaro,
    "rate": _rate,
    "dynball": _dynball,
    "entropy": _entropy,
    "variational": _bars,
    "lyapunov": _lyapunov,
    "hitting": _hitting,
    "set-return": _set_return,
    "ball-return": lambda r, d: _table(r, d, "rows", "delta", "T", "ball_return.png"),
    "rotation-bound": lambda r, d: _table(r, d, "rows", "delta", "T", "rotation_bound.png"),
}


def render(result, directory: Path) -> list[Path]:
    """Draw the figures for ``result`` into ``directory``; returns the written files."""
    directory.mkdir(parents=True, exist_ok=True)
    return RENDERERS[result.experiment](result, directory)
