"""Experiment orchestration: each command writes CSV (and SVG) artifacts into
``<output_dir>/<command>-<hash>/`` where the hash covers the resolved inputs.
A rerun with identical inputs finds the manifest and reuses the directory.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic
from .config import RunConfig, content_hash
from .counting import BipartitionResult, count_bipartition, grid_cut_bonds
from .fitting import BetaTrend, beta_vs_radius, regressor
from .geometry import SectorConfig
from .peps import PepsSpec, build_peps, contract_to_state, sample_bipartitions, verify_bound
from .sweep import RadiusSweep, SweepResult, SweepSpec, run_sweep

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ["r", "theta", "regressor", "mean_legs", "mean_corners", "n_samples"]
FIT_COLUMNS = ["r", "alpha_legs", "beta_legs", "nmse_legs",
               "alpha_corners", "beta_corners", "nmse_corners"]
ANALYTIC_COLUMNS = ["theta", "pskip_closed", "pskip_quad", "pcorner_closed", "pcorner_approx",
                    "mc_skip_freq", "mc_corner_rate",
                    "pcorner_quad", "b_shape", "mc_skip_measure",
                    "skip_discrepancy", "corner_discrepancy", "valid", "error"]
PEPS_COLUMNS = ["seed", "L", "chi", "cut_bonds", "schmidt_rank", "bound", "s_vn", "s2",
                "a_sites", "ok"]
COUNT_COLUMNS = ["theta", "phi", "apex_u", "apex_v", "r", "n_legs", "n_corners", "a_size"]

MANIFEST = "manifest.json"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def write_csv(path: Path, columns, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(buf.getvalue())
    os.replace(tmp, path)


@dataclass
class Outcome:
    directory: Path
    files: list[str] = field(default_factory=list)
    cached: bool = False
    failures: int = 0

    @property
    def ok(self) -> bool:
        return self.failures == 0


class RunDir:
    """Hash-named output directory with a manifest recording what it holds."""

    def __init__(self, root, command: str, payload: dict):
        self.digest = content_hash(command, payload)
        self.path = Path(root) / f"{command}-{self.digest}"
        self.payload = payload

    def cached(self) -> dict | None:
        manifest = self.path / MANIFEST
        if not manifest.exists():
            return None
        meta = json.loads(manifest.read_text())
        if meta.get("hash") != self.digest:
            return None
        if not all((self.path / f).exists() for f in meta.get("files", [])):
            return None
        return meta

    def open(self) -> Path:
        self.path.mkdir(parents=True, exist_ok=True)
        return self.path

    def seal(self, files, failures: int = 0) -> Outcome:
        meta = {"hash": self.digest, "files": list(files), "failures": failures,
                "inputs": self.payload}
        text = json.dumps(meta, sort_keys=True, indent=2, default=repr) + "\n"
        (self.path / MANIFEST).write_text(text)
        return Outcome(self.path, list(files), False, failures)


def _reuse(run: RunDir, force: bool) -> Outcome | None:
    meta = None if force else run.cached()
    if meta is None:
        return None
    log.info("cache hit: %s", run.path)
    return Outcome(run.path, meta["files"], True, meta.get("failures", 0))


def cmd_count(cfg: RunConfig, sector: SectorConfig, force: bool = False):
    payload = {"sector": [sector.theta, sector.phi, list(sector.apex_offset), sector.radius]}
    run = RunDir(cfg.output_dir, "count", payload)
    result = count_bipartition(sector)
    row = [sector.theta, sector.phi, *sector.apex_offset, sector.radius,
           result.n_legs, result.n_corners, result.a_size]
    out = _reuse(run, force)
    if out is None:
        write_csv(run.open() / "count.csv", COUNT_COLUMNS, [row])
        out = run.seal(["count.csv"])
    return result, row, out


# --- sweep -----------------------------------------------------------------

def sweep_spec(cfg: RunConfig) -> SweepSpec:
    return SweepSpec(theta_grid=tuple(cfg.theta_grid), phi_steps=cfg.phi_steps,
                     apex_steps=cfg.apex_steps, r_list=cfg.r_list)


def _sweep_payload(cfg: RunConfig) -> dict:
    keys = ("r_list", "theta_min", "theta_max", "theta_steps", "phi_steps", "apex_steps")
    data = cfg.hashable()
    return {k: data[k] for k in keys}


def _totals_json(result: SweepResult) -> str:
    radii = []
    for r, rs in result.radii.items():
        radii.append({
            "r": r, "theta": [float(t) for t in rs.theta], "sample_count": rs.sample_count,
            "total_legs": rs.total_legs.tolist(), "total_corners": rs.total_corners.tolist(),
            "total_legs_sq": rs.total_legs_sq.tolist(),
            "total_corners_sq": rs.total_corners_sq.tolist(),
        })
    return json.dumps({"radii": radii}, indent=1) + "\n"


def _load_totals(path: Path, spec: SweepSpec) -> SweepResult:
    data = json.loads(path.read_text())
    result = SweepResult(spec)
    for item in data["radii"]:
        result.radii[float(item["r"])] = RadiusSweep(
            r=float(item["r"]), theta=np.array(item["theta"]),
            total_legs=np.array(item["total_legs"], dtype=np.int64),
            total_corners=np.array(item["total_corners"], dtype=np.int64),
            total_legs_sq=np.array(item["total_legs_sq"], dtype=np.int64),
            total_corners_sq=np.array(item["total_corners_sq"], dtype=np.int64),
            sample_count=int(item["sample_count"]),
        )
    return result


def _sweep_rows(result: SweepResult):
    for r, theta, legs, corners, n in result.rows():
        reg = regressor(theta) if theta > 0 else math.nan
        yield [r, theta, reg, legs, corners, n]


def cmd_sweep(cfg: RunConfig, workers: int = 1, force: bool = False):
    """Run (or reload) the sweep; returns the exact result and the outcome."""
    spec = sweep_spec(cfg)
    run = RunDir(cfg.output_dir, "sweep", _sweep_payload(cfg))
    out = _reuse(run, force)
    if out is not None:
        return _load_totals(run.path / "sweep_totals.json", spec), out
    result = run_sweep(spec, workers=workers)
    path = run.open()
    write_csv(path / "sweep.csv", SWEEP_COLUMNS, _sweep_rows(result))
    (path / "sweep_totals.json").write_text(_totals_json(result))
    return result, run.seal(["sweep.csv", "sweep_totals.json"])


# --- fit -------------------------------------------------------------------

def _fit_payload(cfg: RunConfig) -> dict:
    return {**_sweep_payload(cfg), "fit_window": list(cfg.fit_window)}


def fit_rows(trend: BetaTrend):
    for k, r in enumerate(trend.r_values):
        fl, fc = trend.fits_legs[k], trend.fits_corners[k]
        yield [r, fl.alpha, fl.beta, fl.nmse, fc.alpha, fc.beta, fc.nmse]


def cmd_fit(cfg: RunConfig, workers: int = 1, force: bool = False):
    sweep, _ = cmd_sweep(cfg, workers=workers)
    trend = beta_vs_radius(sweep, cfg.fit_window)
    run = RunDir(cfg.output_dir, "fit", _fit_payload(cfg))
    out = _reuse(run, force)
    if out is None:
        write_csv(run.open() / "fit.csv", FIT_COLUMNS, fit_rows(trend))
        out = run.seal(["fit.csv"])
    return trend, out


# --- analytic --------------------------------------------------------------

def _analytic_payload(cfg: RunConfig) -> dict:
    keys = ("theta_min", "theta_max", "theta_steps", "phi_steps", "apex_steps", "quad_tol")
    data = cfg.hashable()
    return {k: data[k] for k in keys}


def analytic_rows(rows):
    for e in rows:
        yield [e.theta, e.pskip_closed, e.pskip_quad, e.pcorner_closed, e.pcorner_approx,
               e.mc_skip_freq, e.mc_corner_rate, e.pcorner_quad, e.b_shape,
               e.mc_skip_freq * math.pi / 2, e.skip_discrepancy, e.corner_discrepancy,
               e.valid, e.error]


def cmd_analytic(cfg: RunConfig, force: bool = False):
    rows = analytic.compare_estimators(cfg.theta_grid, cfg.phi_steps, cfg.apex_steps,
                                       cfg.quad_tol)
    # a row fails only when every estimator of the skip probability is unavailable
    failures = sum(1 for e in rows
                   if all(math.isnan(v) for v in (e.pskip_closed, e.pskip_quad, e.mc_skip_freq)))
    run = RunDir(cfg.output_dir, "analytic", _analytic_payload(cfg))
    out = _reuse(run, force)
    if out is None:
        write_csv(run.open() / "analytic.csv", ANALYTIC_COLUMNS, analytic_rows(rows))
        out = run.seal(["analytic.csv"], failures)
    return rows, out


# --- pepscheck -------------------------------------------------------------

PEPS_SIZES = (2, 3, 4)
PEPS_BONDS = (1, 2)


def peps_instances(seed: int, instances: int):
    for k in range(instances):
        L = PEPS_SIZES[k % len(PEPS_SIZES)]
        chi = PEPS_BONDS[(k // len(PEPS_SIZES)) % len(PEPS_BONDS)]
        yield PepsSpec(grid_size=L, physical_dim=2, bond_dim=chi, seed=seed + k)


def run_pepscheck(cfg: RunConfig, instances: int = 200, bipartitions: int = 5):
    """Yield ``(spec, a_sites, report)`` for every instance and bipartition."""
    for spec in peps_instances(cfg.seed, instances):
        state = contract_to_state(build_peps(spec))
        rng = np.random.default_rng([cfg.seed, spec.seed, 1])
        for a_sites in sample_bipartitions(spec.grid_size, bipartitions, rng):
            cut = grid_cut_bonds(spec.grid_size, a_sites)
            yield spec, a_sites, verify_bound(spec, a_sites, cut, state, cfg.rank_tol)


def cmd_pepscheck(cfg: RunConfig, instances: int = 200, bipartitions: int = 5,
                  force: bool = False):
    payload = {"seed": cfg.seed, "rank_tol": cfg.rank_tol, "instances": instances,
               "bipartitions": bipartitions}
    run = RunDir(cfg.output_dir, "pepscheck", payload)
    out = _reuse(run, force)
    if out is not None:
        return out
    rows, failures = [], 0
    for spec, a_sites, rep in run_pepscheck(cfg, instances, bipartitions):
        failures += not rep.passed
        rows.append([spec.seed, spec.grid_size, spec.bond_dim, rep.cut_bonds,
                     rep.schmidt_rank, rep.rank_bound, rep.s_vn, rep.s2,
                     " ".join(map(str, a_sites)), rep.passed])
    write_csv(run.open() / "peps.csv", PEPS_COLUMNS, rows)
    return run.seal(["peps.csv"], failures)


# --- plot ------------------------------------------------------------------

def cmd_plot(cfg: RunConfig, workers: int = 1, force: bool = False):
    from . import plotting

    run = RunDir(cfg.output_dir, "plot", {**_fit_payload(cfg), **_analytic_payload(cfg)})
    out = _reuse(run, force)
    if out is not None:
        return out
    trend, _ = cmd_fit(cfg, workers=workers)
    sweep, _ = cmd_sweep(cfg, workers=workers)
    path = run.open()
    r0 = min(sweep.radii)
    k0 = trend.r_values.index(r0)
    plotting.plot_counts(sweep[r0], trend.fits_legs[k0], trend.fits_corners[k0],
                         path / "counts.svg")
    plotting.plot_beta(trend, path / "beta_vs_r.svg")
    plotting.plot_fit_error(trend, path / "fit_error.svg")
    files = ["counts.svg", "beta_vs_r.svg", "fit_error.svg"]
    # closed forms for the skip probability only exist above 2*atan(1/2)
    window = [t for t in cfg.theta_grid if t > analytic.THETA_CRITICAL]
    if window:
        rows = analytic.compare_estimators(window, cfg.phi_steps, cfg.apex_steps, cfg.quad_tol)
        plotting.plot_analytic(rows, path / "analytic.svg")
        files.append("analytic.svg")
    write_csv(path / "fit.csv", FIT_COLUMNS, fit_rows(trend))
    files.append("fit.csv")
    return run.seal(files)
