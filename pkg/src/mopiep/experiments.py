"""Numerical experiment harness producing per-(N, algorithm) error tables.

Every experiment is a list of cells (one per N); each cell solves the
system with a fixed set of algorithms in double precision and compares
against the reference recurrence matrix. Synthetic families are averaged
over ``runs`` weight draws whose seeds are derived from the master seed.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .diagnostics import (_threads, backward_errors, biorth_loss, biorth_loss_scaled,
                          conditioning_estimate, forward_error)
from .errors import MopError, ValidationError
from .model import Hahn, Kravchuk, Synthetic, build_system
from .moments import reference_solve
from .rng import derive_seed
from .solvers import solve

__all__ = ["ExperimentRow", "ExperimentReport", "Experiment", "EXPERIMENTS", "run_experiment",
           "parse_ns", "format_number"]

EPS = 2.0 ** -52


@dataclass
class ExperimentRow:
    n: int
    algorithm: str
    e_n: float | None = None
    biorth_loss: float | None = None
    biorth_loss_scaled: float | None = None
    backward_nodes: float | None = None
    backward_w1: float | None = None
    backward_w2: float | None = None
    conditioning: float | None = None
    runtime_seconds: float | None = None
    failures: int = 0


COLUMNS = [f.name for f in fields(ExperimentRow)]


def format_number(x) -> str:
    """Shortest round-trip decimal; blank for a missing value."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


@dataclass
class ExperimentReport:
    name: str
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(COLUMNS)
        for r in self.rows:
            wr.writerow([r.n, r.algorithm] + [format_number(getattr(r, c)) for c in COLUMNS[2:]])
        return buf.getvalue()

    def column(self, algorithm: str, name: str) -> dict:
        """{N: value} for one algorithm."""
        return {r.n: getattr(r, name) for r in self.rows if r.algorithm == algorithm}


@dataclass(frozen=True)
class Experiment:
    family: str                # kravchuk | hahn | equidistant | chebyshev
    algorithms: tuple
    metrics: tuple             # subset of forward, biorth, backward, conditioning
    default_ns: range
    default_runs: int = 1


_CMP = ("core", "kryl", "krylreorth_full")
_SCALING = ("krylreorth_partial", "kryl", "krylreorth_full")

EXPERIMENTS = {
    "fig1_kravchuk": Experiment("kravchuk", _CMP, ("forward", "biorth", "conditioning"), range(5, 31)),
    "fig1_hahn": Experiment("hahn", _CMP, ("forward", "biorth", "conditioning"), range(5, 31)),
    "fig2_hahn_backward": Experiment("hahn", _CMP, ("backward",), range(5, 31)),
    "fig3_equidistant": Experiment("equidistant", _CMP, ("forward", "biorth"), range(5, 31), 20),
    "fig4_chebyshev": Experiment("chebyshev", _CMP, ("forward", "biorth"), range(5, 31), 20),
    # fig5_scaling is two experiments; see run_experiment
    "fig5_equidistant": Experiment("equidistant", _SCALING, ("forward",), range(5, 251, 5)),
    "fig5_chebyshev": Experiment("chebyshev", _SCALING, ("forward",), range(5, 1001, 25)),
}


def parse_ns(text: str) -> list[int]:
    """'5:30' (inclusive), '5:250:5' or '5,10,20'."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            lo, hi, step = parts
            if step <= 0:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"bad N range {text!r}") from None


def family_for(name: str, seed: int = 0):
    if name == "kravchuk":
        return Kravchuk()
    if name == "hahn":
        return Hahn()
    if name in ("equidistant", "chebyshev"):
        return Synthetic(name, seed)
    raise ValidationError(f"unknown family {name!r}")


def _measure(exp: Experiment, system, Href, algorithm: str, timing: bool) -> dict:
    out = {}
    t0 = time.perf_counter()
    try:
        # only exact breakdowns stop a run; near-breakdowns show up in e_n
        sol = solve(system, algorithm, kind="double", breakdown_tol=0.0)
    except MopError:
        return {}
    if timing:
        out["runtime_seconds"] = time.perf_counter() - t0
    if "forward" in exp.metrics:
        out["e_n"] = forward_error(sol.H, Href)
    if "biorth" in exp.metrics:
        out["biorth_loss"] = biorth_loss(sol.W, sol.V)
        out["biorth_loss_scaled"] = biorth_loss_scaled(sol.W, sol.V, system.astype("double").nodes)
    if "backward" in exp.metrics:
        try:
            b = backward_errors(system, sol.H)
        except MopError:
            b = {k: math.nan for k in ("backward_nodes", "backward_w1", "backward_w2")}
        out.update(b)
    return out


def _cell(exp: Experiment, N: int, runs: int, seed: int, cond_trials: int, timing: bool):
    """Rows for one N, averaged over runs (arithmetic mean of successful runs)."""
    acc = {a: [] for a in exp.algorithms}
    cond = []
    for run in range(runs):
        fam = family_for(exp.family, derive_seed(seed, run))
        system = build_system(fam, N)
        Href = reference_solve(system) if "forward" in exp.metrics else None
        for a in exp.algorithms:
            acc[a].append(_measure(exp, system, Href, a, timing))
        if "conditioning" in exp.metrics:
            cond.append(conditioning_estimate(system, EPS, cond_trials, derive_seed(seed, run)))
    rows = []
    for a in exp.algorithms:
        ok = [m for m in acc[a] if m]
        row = ExperimentRow(N, a, failures=runs - len(ok))
        keys = {k for m in ok for k in m}
        for k in sorted(keys):
            setattr(row, k, float(np.mean([m[k] for m in ok])))
        if cond:
            row.conditioning = float(np.mean(cond))
        rows.append(row)
    return rows


def run_experiment(name: str, ns=None, runs: int | None = None, seed: int = 0,
                   cond_trials: int = 5, timing: bool = False,
                   workers: int | None = None) -> ExperimentReport:
    """Run one named experiment; cells run in parallel, rows keep cell order."""
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    ns = list(exp.default_ns if ns is None else ns)
    if any(N < 3 for N in ns):
        raise ValidationError("every N must be at least 3")
    runs = exp.default_runs if runs is None else runs
    if runs < 1:
        raise ValidationError("runs must be positive")
    workers = workers or _threads()

    def one(N):
        return _cell(exp, N, runs, seed, cond_trials, timing)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            cells = list(ex.map(one, ns))
    else:
        cells = [one(N) for N in ns]
    return ExperimentReport(name, [r for c in cells for r in c])
