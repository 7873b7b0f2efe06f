"""Execute a run configuration and collect a machine-readable report."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chain import ChainSpec, build_hamiltonian
from .config import Experiment, RunConfig, config_to_dict
from .currents import CurrentProfile, current_profile
from .driving import DrivingConfig, Orientation, build_lindblad_set, invert_baths
from .errors import CapacityError, ConvergenceError
from .liouvillian import SteadyStateResult, assemble, steady_state
from .symmetry import CASE_FAMILY, build_A, map_state, verify_mapping
from .uniqueness import uniqueness_witnesses

log = logging.getLogger(__name__)


@dataclass
class RunReport:
    """Everything a run produced.

    ``timings`` is kept apart so that :meth:`to_dict` with
    ``include_timings=False`` is fully deterministic.
    """

    config: dict
    steady_state: dict = field(default_factory=dict)
    profiles: dict[str, CurrentProfile] = field(default_factory=dict)
    one_way_street: Optional[dict] = None
    symmetry: Optional[dict] = None
    uniqueness: Optional[dict] = None
    status: str = "ok"
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "status": self.status,
            "config": self.config,
            "steady_state": self.steady_state,
            "profiles": {k: p.to_dict() for k, p in self.profiles.items()},
            "one_way_street": self.one_way_street,
            "symmetry": self.symmetry,
            "uniqueness": self.uniqueness,
        }
        if include_timings:
            out["timings"] = dict(self.timings)
        return out

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, allow_nan=True) + "\n"


@contextmanager
def _timed(report: RunReport, phase: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        report.timings[phase] = report.timings.get(phase, 0.0) + time.perf_counter() - t0


def _solve(spec: ChainSpec, drv: DrivingConfig, cfg: RunConfig) -> SteadyStateResult:
    sop = assemble(build_hamiltonian(spec), build_lindblad_set(drv, spec.n), spec.n, cfg.solver.mode)
    return steady_state(sop, tol=cfg.solver.tol, max_steps=cfg.solver.max_steps)


def _summary(res: SteadyStateResult) -> dict:
    diag = res.diagnostics
    return {
        "mode": res.mode.value,
        "residual": res.residual,
        "null_dim": res.null_dim,
        "gap": res.gap,
        "steps": res.steps,
        "trace_deviation": diag.trace_deviation,
        "hermiticity_deviation": diag.hermiticity_deviation,
        "min_eigenvalue": diag.min_eigenvalue,
        "warnings": list(res.warnings),
    }


def _max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.subtract(a, b)))) if len(a) else 0.0


def compare_orientations(normal: CurrentProfile, inverted: CurrentProfile, tol: float = 1e-8) -> dict:
    """Energy-current delta and the per-bond spin-current relation between orientations."""
    negated = _max_abs_diff(inverted.spin, [-x for x in normal.spin])
    same = _max_abs_diff(inverted.spin, normal.spin)
    if negated <= tol and same <= tol:
        relation = "zero"
    elif negated <= tol:
        relation = "negated"
    elif same <= tol:
        relation = "preserved"
    else:
        relation = "neither"
    return {
        "energy_delta": _max_abs_diff(normal.energy, inverted.energy),
        "spin_negation_delta": negated,
        "spin_preservation_delta": same,
        "spin_relation": relation,
    }


def run(cfg: RunConfig) -> RunReport:
    """Run the experiment(s) selected in ``cfg``.

    Raises
    ------
    ConvergenceError
        When a steady-state solve fails; ``partial`` holds the report
        assembled so far with ``status`` set to ``"convergence_failure"``.
    """
    report = RunReport(config=config_to_dict(cfg))
    exp = cfg.experiment
    everything = exp is Experiment.ALL
    spec, drv = cfg.chain, cfg.driving
    try:
        if exp is Experiment.STEADY_STATE:
            _steady(report, spec, drv, cfg)
        if exp is Experiment.ONE_WAY_STREET or everything:
            _one_way_street(report, spec, drv, cfg)
    except ConvergenceError as exc:
        report.status = "convergence_failure"
        raise ConvergenceError(str(exc), exc.best_residual, report) from exc
    if exp is Experiment.SYMMETRY_AUDIT or everything:
        with _timed(report, "symmetry"):
            normal = dataclasses.replace(drv, orientation=Orientation.NORMAL)
            report.symmetry = verify_mapping(spec, normal, strict=False, seed=cfg.seed).to_dict()
    if exp is Experiment.UNIQUENESS_AUDIT or everything:
        with _timed(report, "uniqueness"):
            report.uniqueness = _uniqueness(spec, drv)
    return report


def _steady(report, spec, drv, cfg):
    with _timed(report, f"solve_{drv.orientation.value.lower()}"):
        res = _solve(spec, drv, cfg)
    key = drv.orientation.value.lower()
    report.steady_state[key] = _summary(res)
    with _timed(report, "profiles"):
        report.profiles[key] = current_profile(res.rho, spec)


def _one_way_street(report, spec, drv, cfg):
    normal = dataclasses.replace(drv, orientation=Orientation.NORMAL)
    inverted = invert_baths(normal)
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = {"normal": pool.submit(_solve, spec, normal, cfg),
                   "inverted": pool.submit(_solve, spec, inverted, cfg)}
        results = {k: f.result() for k, f in futures.items()}
    report.timings["solve_both"] = time.perf_counter() - t0
    with _timed(report, "profiles"):
        for k, res in results.items():
            report.steady_state[k] = _summary(res)
            report.profiles[k] = current_profile(res.rho, spec)
    comparison = compare_orientations(report.profiles["normal"], report.profiles["inverted"])
    comparison["state_mapping_residual"] = None
    if CASE_FAMILY[drv.case] is spec.kind:
        A = build_A(drv.case, drv.theta)
        mapped = map_state(results["normal"].rho, A)
        comparison["state_mapping_residual"] = float(np.abs(mapped - results["inverted"].rho).max())
    report.one_way_street = comparison


def _uniqueness(spec, drv) -> dict:
    try:
        return uniqueness_witnesses(spec, drv).to_dict()
    except CapacityError as exc:
        return {"error": str(exc)}


def write_profiles_csv(report: RunReport, path) -> None:
    """One row per (orientation, kind, index); columns ``index, kind, orientation, value``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "kind", "orientation", "value"])
        for orient in ("normal", "inverted"):
            prof = report.profiles.get(orient)
            if prof is None:
                continue
            for j, v in enumerate(prof.spin, start=1):
                w.writerow([j, "spin", orient, repr(v)])
            for j, v in enumerate(prof.energy, start=2):
                w.writerow([j, "energy", orient, repr(v)])
            for j, v in enumerate(prof.magnetic or [], start=2):
                w.writerow([j, "magnetic", orient, repr(v)])


def write_report(report: RunReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_json())
