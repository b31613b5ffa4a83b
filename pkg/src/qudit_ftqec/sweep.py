"""Threshold and scaling sweeps: plan -> rows -> CSV, plus slope fits.

A sweep plan enumerates (d, T2, gate) points for single-qudit cycles, the
uncorrected baseline, or two-qubit controlled-phase cycles.  Every point is
deterministic, so rerunning a plan reproduces the CSV byte for byte; failed
points become error rows instead of aborting the whole sweep.
"""

import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .code_synthesis import CodeWords, ErrorBasis
from .config import ConfigError, RunConfig, config_from_dict, default_config, load_config
from .protocol import (
    PAPER_GATE_SET,
    MeasurementModel,
    build_system,
    calibrated_rabi_max,
    run_cycle,
    uncorrected_baseline,
)

CSV_BASE_HEADER = (
    "d",
    "t2_us",
    "theta",
    "phi",
    "circuit",
    "E_e",
    "F_e",
    "leakage",
    "acceptance",
)

CIRCUITS = ("single_gate_cycle", "two_qubit_cycle", "baseline")


@dataclass(frozen=True)
class SweepPlan:
    """Grid of simulation points plus output/runtime options."""

    d_list: tuple[int, ...]
    t2_grid: tuple[float, ...]          # seconds, ascending
    gate_set: tuple[tuple[float, float], ...]
    circuit: str = "single_gate_cycle"
    measurement: MeasurementModel = field(default_factory=MeasurementModel)
    include_baseline: bool = False
    lambda_shift: float = 2.0 * np.pi * 0.05e9
    phi: float = np.pi
    system_config: str | None = None    # path; None -> packaged default

    def __post_init__(self):
        if not self.d_list or not self.t2_grid:
            raise ConfigError("plan grids must be non-empty")
        if self.circuit not in CIRCUITS:
            raise ConfigError(f"unknown circuit {self.circuit!r}")
        if any(t <= 0 for t in self.t2_grid):
            raise ConfigError("T2 values must be positive")
        object.__setattr__(self, "t2_grid", tuple(sorted(self.t2_grid)))


def plan_from_dict(data: dict) -> SweepPlan:
    t2 = data.get("t2_us", [10.0])
    if isinstance(t2, dict):
        grid = np.logspace(
            np.log10(float(t2["min"])), np.log10(float(t2["max"])), int(t2["points"])
        )
        t2_values = tuple(float(x) * 1e-6 for x in grid)
    else:
        t2_values = tuple(float(x) * 1e-6 for x in t2)
    gates = data.get("gates", "paper5")
    if gates == "paper5":
        gate_set = PAPER_GATE_SET
    else:
        gate_set = tuple((float(a), float(b)) for a, b in gates)
    meas = data.get("measurement", {})
    return SweepPlan(
        d_list=tuple(int(d) for d in data.get("d_list", [4])),
        t2_grid=t2_values,
        gate_set=gate_set,
        circuit=data.get("circuit", "single_gate_cycle"),
        measurement=MeasurementModel(
            p_m=float(meas.get("p_m", 0.0)), n_rep=int(meas.get("n_rep", 1))
        ),
        include_baseline=bool(data.get("include_baseline", False)),
        lambda_shift=2.0 * np.pi * 1e9 * float(data.get("lambda_ghz", 0.05)),
        phi=float(data.get("phi", np.pi)),
        system_config=data.get("system"),
    )


def load_plan(path: str | Path) -> SweepPlan:
    try:
        with open(path) as fh:
            return plan_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read plan {path}: {exc}") from exc


def _plan_config(plan: SweepPlan) -> RunConfig:
    if plan.system_config:
        return load_config(plan.system_config)
    return default_config()


# -- code-word disk cache ------------------------------------------------------


def cache_dir() -> Path:
    return Path(os.environ.get("QUDIT_FTQEC_CACHE", ".qudit-ftqec-cache"))


def _code_cache_key(cfg: RunConfig, d: int) -> str:
    payload = {
        "topology": {
            k: cfg.raw.get(k) for k in ("sites", "J", "D", "g", "B") if k in cfg.raw
        },
        "dephasing": cfg.raw.get("dephasing"),
        "d": d,
        "t": cfg.drive.gate_time,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:24]


def cached_codewords(cfg: RunConfig, d: int) -> tuple[CodeWords, ErrorBasis] | None:
    path = cache_dir() / f"code-{_code_cache_key(cfg, d)}.json"
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        return CodeWords.from_dict(data["codewords"]), ErrorBasis.from_dict(data["basis"])
    except (ValueError, KeyError):
        return None


def store_codewords(cfg: RunConfig, d: int, cw: CodeWords, basis: ErrorBasis) -> None:
    path = cache_dir() / f"code-{_code_cache_key(cfg, d)}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"codewords": cw.to_dict(), "basis": basis.to_dict()}))


# -- running -------------------------------------------------------------------


def _enumerate_points(plan: SweepPlan) -> list[dict]:
    points = []
    if plan.circuit == "two_qubit_cycle":
        d_values = list(plan.d_list)
        if plan.include_baseline and 2 not in d_values:
            d_values = [2] + d_values
        for d in d_values:
            for t2 in plan.t2_grid:
                points.append({"kind": "cphase", "d": d, "t2": t2})
        return points
    d_values = list(plan.d_list)
    if plan.circuit == "baseline":
        d_values = [2]
    elif plan.include_baseline:
        d_values = [2] + [d for d in d_values if d != 2]
    for d in d_values:
        for t2 in plan.t2_grid:
            for theta, phi in plan.gate_set:
                kind = "baseline" if d == 2 else "single_gate_cycle"
                points.append(
                    {"kind": kind, "d": d, "t2": t2, "theta": theta, "phi": phi}
                )
    return points


def _run_point(cfg: RunConfig, plan: SweepPlan, point: dict) -> dict:
    kind = point["kind"]
    if kind == "baseline":
        rabi = calibrated_rabi_max(cfg)
        rep = uncorrected_baseline(
            point["theta"], point["phi"], point["t2"], rabi, cfg.integrator
        )
        return rep.as_row("baseline")
    if kind == "single_gate_cycle":
        system = build_system(cfg, point["d"])
        rep = run_cycle(
            system, point["theta"], point["phi"], point["t2"], plan.measurement
        )
        return rep.as_row("single_gate_cycle")
    if kind == "cphase":
        from .two_qubit import build_architecture, run_two_qubit_cycle

        arch = build_architecture(
            cfg, point["d"], plan.lambda_shift, plan.phi, corrected=point["d"] > 2
        )
        res = run_two_qubit_cycle(arch, point["t2"], plan.measurement)
        row = {
            "d": point["d"],
            "t2_us": point["t2"] * 1e6,
            "theta": 2.0 * np.pi,
            "phi": plan.phi,
            "circuit": "cphase",
            "E_e": res["e_e"],
            "F_e": res["f_e"],
            "leakage": 0.0,
            "acceptance": 1.0,
        }
        for k, p in enumerate(res["syndromes"]):
            row[f"syndrome_{k}"] = float(p)
        return row
    raise ConfigError(f"unknown point kind {kind}")


_WORKER_STATE: dict = {}


def _worker_init(raw_cfg: dict, plan_blob: bytes):
    import pickle

    _WORKER_STATE["cfg"] = config_from_dict(raw_cfg)
    _WORKER_STATE["plan"] = pickle.loads(plan_blob)


def _worker_run(point: dict) -> dict:
    try:
        return _run_point(_WORKER_STATE["cfg"], _WORKER_STATE["plan"], point)
    except Exception as exc:  # error rows keep the sweep going
        return _error_row(point, exc)


def _error_row(point: dict, exc: Exception) -> dict:
    return {
        "d": point.get("d"),
        "t2_us": point.get("t2", np.nan) * 1e6,
        "theta": point.get("theta", ""),
        "phi": point.get("phi", ""),
        "circuit": "error",
        "E_e": "",
        "F_e": "",
        "leakage": "",
        "acceptance": "",
        "error": f"{type(exc).__name__}: {exc}",
    }


def run_sweep(plan: SweepPlan, cfg: RunConfig | None = None, jobs: int = 1) -> list[dict]:
    """Execute every plan point; deterministic row order regardless of jobs."""
    cfg = cfg or _plan_config(plan)
    points = _enumerate_points(plan)
    rows: list[dict | None] = [None] * len(points)
    if jobs <= 1:
        for i, point in enumerate(points):
            try:
                rows[i] = _run_point(cfg, plan, point)
            except Exception as exc:
                rows[i] = _error_row(point, exc)
            print(f"[{i + 1}/{len(points)}] {points[i]}", file=sys.stderr)
    else:
        import pickle

        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_worker_init,
            initargs=(cfg.raw, pickle.dumps(plan)),
        ) as pool:
            for i, row in enumerate(pool.map(_worker_run, points)):
                rows[i] = row
                print(f"[{i + 1}/{len(points)}] {points[i]}", file=sys.stderr)
    return [r for r in rows if r is not None]


# -- fitting -------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def fit_slope(
    rows: list[dict],
    x_kind: str = "inv_t2",
    d: int | None = None,
    circuit: str | None = None,
    floor: float = 1e-14,
) -> FitResult:
    """OLS on log axes: log10(E_e) vs log10(1/T2), or vs d.

    Rows are filtered (error rows and E_e below the numerical floor dropped),
    grouped by abscissa with E_e averaged per group (gate averaging), then
    fitted.  Requires at least 4 finite points.
    """
    if x_kind not in ("inv_t2", "dim"):
        raise ValueError("x_kind must be 'inv_t2' or 'dim'")
    groups: dict[float, list[float]] = {}
    for row in rows:
        if row.get("circuit") == "error" or row.get("E_e") in ("", None):
            continue
        if d is not None and int(row["d"]) != d:
            continue
        if circuit is not None and row.get("circuit") != circuit:
            continue
        e = float(row["E_e"])
        if not np.isfinite(e) or e < floor:
            continue
        x = 1.0 / (float(row["t2_us"]) * 1e-6) if x_kind == "inv_t2" else float(row["d"])
        groups.setdefault(x, []).append(e)
    if len(groups) < 4:
        raise ValueError(f"need at least 4 abscissa points, have {len(groups)}")
    xs = np.array(sorted(groups))
    ys = np.array([np.mean(groups[x]) for x in xs])
    xfit = np.log10(xs) if x_kind == "inv_t2" else xs
    yfit = np.log10(ys)
    a = np.vstack([xfit, np.ones_like(xfit)]).T
    coef, *_ = np.linalg.lstsq(a, yfit, rcond=None)
    pred = a @ coef
    ss_res = float(((yfit - pred) ** 2).sum())
    ss_tot = float(((yfit - yfit.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        r_squared=float(r2),
        n_points=len(xs),
    )


def crossover_t2(
    rows: list[dict], d: int, circuit: str, baseline_circuit: str, baseline_d: int = 2
) -> float | None:
    """T2 where the encoded curve crosses its baseline (log-log interpolation)."""

    def curve(dd, cc):
        pts: dict[float, list[float]] = {}
        for row in rows:
            if row.get("circuit") != cc or row.get("E_e") in ("", None):
                continue
            if int(row["d"]) != dd:
                continue
            pts.setdefault(float(row["t2_us"]) * 1e-6, []).append(float(row["E_e"]))
        t2s = np.array(sorted(pts))
        return t2s, np.array([np.mean(pts[t]) for t in t2s])

    t2a, ea = curve(d, circuit)
    t2b, eb = curve(baseline_d, baseline_circuit)
    common = np.intersect1d(t2a, t2b)
    if len(common) < 2:
        return None
    ea = np.interp(common, t2a, ea)
    eb = np.interp(common, t2b, eb)
    diff = np.log10(np.maximum(ea, 1e-300)) - np.log10(np.maximum(eb, 1e-300))
    for i in range(len(common) - 1):
        if diff[i] == 0.0:
            return float(common[i])
        if diff[i] * diff[i + 1] < 0:
            x0, x1 = np.log10(common[i]), np.log10(common[i + 1])
            frac = diff[i] / (diff[i] - diff[i + 1])
            return float(10 ** (x0 + frac * (x1 - x0)))
    return None


# -- export --------------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and np.isnan(value):
        return ""
    return repr(float(value))


def export(rows: list[dict], path: str | Path) -> Path:
    """Deterministic CSV with the fixed base header plus syndrome columns."""
    max_syn = 0
    for row in rows:
        for key in row:
            if key.startswith("syndrome_"):
                max_syn = max(max_syn, int(key.split("_")[1]) + 1)
    header = list(CSV_BASE_HEADER) + [f"syndrome_{k}" for k in range(max_syn)]
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_format_cell(row.get(col)) for col in header) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path: str | Path) -> list[dict]:
    """Parse an exported CSV back into row dictionaries."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines:
        return []
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split(",")
        row: dict = {}
        for key, cell in zip(header, cells):
            if cell == "":
                row[key] = ""
            elif key in ("d",):
                row[key] = int(cell)
            elif key in ("circuit", "error"):
                row[key] = cell
            else:
                try:
                    row[key] = float(cell)
                except ValueError:
                    row[key] = cell
        rows.append(row)
    return rows
