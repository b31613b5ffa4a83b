"""JSON configuration: topology, dephasing bath, drive, integrator, measurement.

Schema (energies in GHz, field in tesla, times as suffixed):

    {
      "sites": [{"index": 1, "s": 0.5}, ...],
      "J": [[i, j, value_ghz], ...],          # Heisenberg couplings
      "D": [[i, j, value_ghz], ...],          # axial antisymmetric exchange
      "g": [g_1, ...],
      "B": 0.02,
      "dephasing": {"C_mode": "uniform" | "matrix",
                    "c": 1.0 | "C": [[...]], "t2_ref_us": 10.0},
      "drive": {"gate_time_ns": 90.0,
                "calibration_gate": [theta, phi],
                "linewidth_factor": 1.0},
      "integrator": {"dt_cap": 0.02, "n_max": 500000},
      "measurement": {"p_m": 0.0, "n_rep": 1},
      "ancilla": {"t2_factor": 1.0}
    }

Site indices in the file may start anywhere; they are mapped to 0-based
positions in sorted order.  The packaged default (``defaults/ni7.json``) is
the seven-spin cluster every "default" test binds to.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .constants import GHZ
from .dephasing import DephasingSpec
from .lindblad import IntegratorConfig
from .spin_model import SpinTopology


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class DriveConfig:
    """Drive calibration: the d=4 reference planar gate compiles to gate_time."""

    gate_time: float = 90e-9
    calibration_gate: tuple[float, float] = (np.pi / 2, np.pi)
    linewidth_factor: float = 1.0


@dataclass(frozen=True)
class MeasurementConfig:
    p_m: float = 0.0
    n_rep: int = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to build logical-qubit systems."""

    topology: SpinTopology
    dephasing: DephasingSpec
    drive: DriveConfig = field(default_factory=DriveConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    ancilla_t2_factor: float = 1.0
    raw: dict = field(default_factory=dict, repr=False)


def _topology_from_dict(data: dict) -> SpinTopology:
    try:
        sites = sorted(data["sites"], key=lambda s: s["index"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad 'sites' entry: {exc}") from exc
    index_map = {s["index"]: pos for pos, s in enumerate(sites)}
    if len(index_map) != len(sites):
        raise ConfigError("duplicate site indices")
    spins = tuple(float(s["s"]) for s in sites)

    def convert(pairs, name):
        out = []
        for entry in pairs:
            if len(entry) != 3:
                raise ConfigError(f"{name} entries must be [i, j, value_ghz]")
            i, j, val = entry
            if i not in index_map or j not in index_map:
                raise ConfigError(f"{name} coupling ({i},{j}) references unknown site")
            out.append((index_map[i], index_map[j], float(val) * GHZ))
        return tuple(out)

    g = tuple(float(x) for x in data.get("g", [2.0] * len(sites)))
    return SpinTopology(
        spins=spins,
        heisenberg_couplings=convert(data.get("J", []), "J"),
        dm_couplings=convert(data.get("D", []), "D"),
        g_factors=g,
        field_b=float(data.get("B", 0.0)),
    )


def _dephasing_from_dict(data: dict, n_sites: int) -> DephasingSpec:
    mode = data.get("C_mode", "uniform")
    t2_ref = float(data["t2_ref_us"]) * 1e-6
    if mode == "uniform":
        c = float(data.get("c", 1.0))
        matrix = c * np.eye(n_sites)
    elif mode == "matrix":
        matrix = np.asarray(data["C"], dtype=float)
        if matrix.shape != (n_sites, n_sites):
            raise ConfigError(
                f"C matrix shape {matrix.shape} does not match {n_sites} sites"
            )
    else:
        raise ConfigError(f"unknown C_mode {mode!r}")
    return DephasingSpec(c_matrix=matrix, t2_ref=t2_ref)


def config_from_dict(data: dict) -> RunConfig:
    topology = _topology_from_dict(data)
    dephasing = _dephasing_from_dict(data.get("dephasing", {}), topology.n_sites)
    drv = data.get("drive", {})
    drive = DriveConfig(
        gate_time=float(drv.get("gate_time_ns", 90.0)) * 1e-9,
        calibration_gate=tuple(drv.get("calibration_gate", (np.pi / 2, np.pi))),
        linewidth_factor=float(drv.get("linewidth_factor", 1.0)),
    )
    integ = data.get("integrator", {})
    integrator = IntegratorConfig(
        dt_cap=float(integ.get("dt_cap", 0.02)),
        n_max=int(integ.get("n_max", 500_000)),
        trace_tol=float(integ.get("trace_tol", 1e-9)),
        positivity_tol=float(integ.get("positivity_tol", 1e-8)),
    )
    meas = data.get("measurement", {})
    measurement = MeasurementConfig(
        p_m=float(meas.get("p_m", 0.0)), n_rep=int(meas.get("n_rep", 1))
    )
    anc = data.get("ancilla", {})
    return RunConfig(
        topology=topology,
        dephasing=dephasing,
        drive=drive,
        integrator=integrator,
        measurement=measurement,
        ancilla_t2_factor=float(anc.get("t2_factor", 1.0)),
        raw=data,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def default_config() -> RunConfig:
    """The packaged seven-spin cluster default."""
    text = resources.files("qudit_ftqec").joinpath("defaults/ni7.json").read_text()
    return config_from_dict(json.loads(text))
