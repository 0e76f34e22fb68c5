"""Experiment commands driven by a declarative config.

Each ``cmd_*`` function takes an :class:`ExperimentConfig`, writes its
artifacts under ``config.out`` and returns a JSON-ready summary.  Outputs are
deterministic given the config (and seed): numbers are written with
``repr`` precision, JSON keys are sorted, and the resolved config, minus
the output directory, is embedded for provenance.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .channels import (affine_representation, check_tp, compose, eta, eta_from_affine,
                       eta_from_purity, gamma_operator, is_unital)
from .maps import classical_attractor, unitary_channel
from .noise import sdc_channel, sdc_eta_analytic, sdc_eta_exact
from .steady import invariant_state, subleading_modulus
from .torus import TorusSpace, centre_momentum, husimi

log = logging.getLogger(__name__)

COMMANDS = ("eta-sweep", "gamma-map", "invariant", "classical", "compare", "report")

DEFAULT_CLASSICAL = {"k": 0.065, "delta": 0.6, "n_traj": 1000, "n_steps": 5000,
                     "transient": 500}
DEFAULT_THRESHOLDS = {"light_level": -1e-6, "top_fraction": 0.1}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Resolved settings for one CLI command.

    ``channel`` and ``map`` are JSON specs (see :mod:`torusnoise.io`);
    ``grid`` is ``(nq, np)`` and defaults to ``2N x 2N`` when unset.
    """

    command: str
    n: int = 64
    out: str = "out"
    seed: int = 0
    grid: tuple | None = None
    tol: float = 1e-10
    max_iter: int | None = None
    channel: dict | None = None
    map: dict | None = None
    eps: float | list = 0.5
    alphas: list | None = None
    sweep: dict | None = None
    classical: dict = field(default_factory=dict)
    inputs: dict | None = None
    thresholds: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if int(self.n) < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        self.n = int(self.n)
        if self.grid is not None:
            self.grid = parse_grid(self.grid)
        self.classical = {**DEFAULT_CLASSICAL, **self.classical}
        self.thresholds = {**DEFAULT_THRESHOLDS, **self.thresholds}
        if self.alphas is not None and not self.alphas:
            raise ConfigError("alphas must be non-empty")
        if self.sweep is not None:
            for key in ("eps", "alpha"):
                if not self.sweep.get(key):
                    raise ConfigError(f"sweep needs a non-empty {key!r} list")

    @property
    def grid_shape(self) -> tuple:
        return self.grid or (2 * self.n, 2 * self.n)

    def provenance(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d["grid"] = list(self.grid_shape)
        return d

    def path(self, name: str) -> Path:
        return Path(self.out) / name


def parse_grid(grid) -> tuple:
    if isinstance(grid, str):
        try:
            nq, np_ = (int(x) for x in grid.lower().split("x"))
        except ValueError:
            raise ConfigError(f"grid must look like 128x128, got {grid!r}") from None
    else:
        nq, np_ = (int(x) for x in grid)
    if nq < 1 or np_ < 1:
        raise ConfigError(f"grid sizes must be positive, got {grid!r}")
    return (nq, np_)


def load_config(command: str, path=None, **overrides) -> ExperimentConfig:
    """Merge a JSON config file with non-``None`` overrides."""
    data = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    data.pop("command", None)
    data.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(command=command, **data)


def _channel(cfg: ExperimentConfig, spec=None, space=None):
    spec = dict(spec or cfg.channel or {})
    if not spec:
        raise ConfigError(f"{cfg.command} needs a 'channel' spec")
    spec.setdefault("n", cfg.n)
    return io.channel_from_spec(spec, space)


def _write_field(cfg, stem, grid, comments=()):
    """PGM + CSV pair for a Husimi-style field; returns the 'constant' flag."""
    pixels, constant = io.gray_levels(grid.values)
    notes = ["config: " + json.dumps(io._jsonable(cfg.provenance()), sort_keys=True)]
    if constant:
        notes.append("constant-field: mapped to 128")
    io.write_pgm(cfg.path(stem + ".pgm"), io.field_image(pixels), list(comments) + notes)
    io.write_csv(cfg.path(stem + ".csv"), ["q_index", "p_index", "q", "p", "value"],
                 io.grid_rows(grid.values, grid.qs, grid.ps))
    return constant


# --- commands -------------------------------------------------------------

def cmd_eta_sweep(cfg: ExperimentConfig) -> dict:
    """eta of the simple dissipation channel against alpha, per coupling eps."""
    N = cfg.n
    space = TorusSpace(N)
    alphas = cfg.alphas or [k / N for k in range(1, N + 1)]
    if min(alphas) <= 0:
        raise ConfigError("alphas must be positive")
    signed = bool(cfg.options.get("signed", False))
    epss = cfg.eps if isinstance(cfg.eps, list) else [cfg.eps]
    files = {}
    for e in epss:
        rows = []
        for a in alphas:
            exact = sdc_eta_exact(space, e, a, signed)
            chan = eta(sdc_channel(space, e, a, signed))
            if abs(exact - chan) > 1e-10:
                raise ArithmeticError(f"eta mismatch at eps={e}, alpha={a}: {exact} vs {chan}")
            rows.append((a, exact, chan, sdc_eta_analytic(e, a)))
        name = f"eta_sweep_eps{e:g}.csv"
        io.write_csv(cfg.path(name), ["alpha", "eta_exact", "eta_channel", "eta_analytic"], rows)
        files[name] = {"eps": e, "saturation": e**2 * (N - 1),
                       "max_abs_exact_minus_channel": max(abs(r[1] - r[2]) for r in rows)}
    summary = {"config": cfg.provenance(), "files": files}
    io.write_json(cfg.path("eta_sweep.json"), summary)
    return summary


def cmd_gamma_map(cfg: ExperimentConfig) -> dict:
    """Husimi picture of Gamma; negative ('light') cells mark contraction."""
    ch = _channel(cfg)
    G = gamma_operator(ch)
    nq, np_ = cfg.grid_shape
    grid = husimi(ch.space, G, nq, np_)
    constant = _write_field(cfg, "gamma_map", grid)
    level = cfg.thresholds["light_level"]
    summary = {"config": cfg.provenance(), "eta": eta(ch), "constant_field": constant,
               "light_fraction": float(np.mean(grid.values < level)),
               "min": float(grid.values.min()), "max": float(grid.values.max())}
    io.write_json(cfg.path("gamma_map.json"), summary)
    return summary


def _composite(cfg, noise_spec):
    mspec = dict(cfg.map or {"type": "standard", "k": 0.065})
    space = io.map_space(mspec, cfg.n)
    U = io.unitary_from_spec(mspec, space)
    noise = _channel(cfg, noise_spec, space)
    return compose(noise, unitary_channel(U, space)), space


def _invariant_panel(cfg, noise_spec):
    S, space = _composite(cfg, noise_spec)
    rho, report = invariant_state(S, cfg.tol, cfg.max_iter)
    nq, np_ = cfg.grid_shape
    grid = centre_momentum(husimi(space, rho, nq, np_))
    info = {"report": report.to_dict(), "eta": eta(S), "unital": is_unital(S),
            "noise": noise_spec}
    if not report.converged:
        log.warning("invariant state did not converge (residual %.3g)", report.final_residual)
    return grid, info


def cmd_invariant(cfg: ExperimentConfig) -> dict:
    """Invariant state of noise composed with a unitary map, as a Husimi image."""
    base = dict(cfg.channel or {"type": "sdc", "eps": 0.4, "alpha": 1.0 / cfg.n})
    if cfg.sweep is None:
        grid, info = _invariant_panel(cfg, base)
        info["constant_field"] = _write_field(cfg, "invariant", grid)
        if info["unital"]:
            info["note"] = "unital composite: the maximally mixed state is a fixed point"
        summary = {"config": cfg.provenance(), **info}
        io.write_json(cfg.path("invariant.json"), summary)
        return summary
    panels, images = [], []
    for e in cfg.sweep["eps"]:
        for a in cfg.sweep["alpha"]:
            grid, info = _invariant_panel(cfg, {**base, "type": "sdc", "eps": e, "alpha": a})
            pixels, constant = io.gray_levels(grid.values)
            images.append(io.field_image(pixels))
            panels.append({"eps": e, "alpha": a, "constant_field": constant, **info})
    notes = ["rows: eps " + " ".join(map(io.fmt, cfg.sweep["eps"])),
             "cols: alpha " + " ".join(map(io.fmt, cfg.sweep["alpha"])),
             "config: " + json.dumps(io._jsonable(cfg.provenance()), sort_keys=True)]
    io.write_pgm(cfg.path("invariant_sweep.pgm"),
                 io.montage(images, ncols=len(cfg.sweep["alpha"])), notes)
    summary = {"config": cfg.provenance(), "panels": panels}
    io.write_json(cfg.path("invariant_sweep.json"), summary)
    return summary


def _classical_hist(cfg):
    c = cfg.classical
    nq, np_ = cfg.grid_shape
    return classical_attractor(float(c["k"]), float(c["delta"]), int(c["n_traj"]),
                               int(c["n_steps"]), int(c["transient"]), nq, np_, cfg.seed)


def cmd_classical(cfg: ExperimentConfig) -> dict:
    """Histogram of the dissipative classical standard map after a transient."""
    c = cfg.classical
    if not 0.0 < float(c["delta"]) <= 1.0:
        raise ConfigError(f"delta must lie in (0, 1], got {c['delta']}")
    hist = _classical_hist(cfg)
    pixels, constant = io.gray_levels(hist.counts)
    notes = ["config: " + json.dumps(io._jsonable(cfg.provenance()), sort_keys=True)]
    if constant:
        notes.append("constant-field: mapped to 128")
    io.write_pgm(cfg.path("classical.pgm"), io.field_image(pixels), notes)
    io.write_csv(cfg.path("classical.csv"), ["q_index", "p_index", "count"],
                 io.grid_rows(hist.counts))
    summary = {"config": cfg.provenance(), "total": hist.total, "seed": cfg.seed,
               "occupied_fraction": hist.occupied_fraction(), "constant_field": constant}
    io.write_json(cfg.path("classical.json"), summary)
    return summary


class GridMismatchError(ValueError):
    pass


def compare_fields(a, b, top_fraction: float = 0.1) -> dict:
    """Pearson correlation and top-cell support overlap of two fields.

    The support of a field is its ``ceil(top_fraction * size)`` largest
    cells (ties broken by cell index); the overlap is the shared fraction.
    A constant field has no defined correlation: it is reported as 0 and
    flagged.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise GridMismatchError(f"grid shapes differ: {a.shape} vs {b.shape}")
    x, y = a.ravel(), b.ravel()
    constant = bool(np.ptp(x) == 0 or np.ptp(y) == 0)
    r = 0.0 if constant else float(np.corrcoef(x, y)[0, 1])
    k = int(np.ceil(top_fraction * x.size))
    top_a = np.argsort(-x, kind="stable")[:k]
    top_b = np.argsort(-y, kind="stable")[:k]
    overlap = np.intersect1d(top_a, top_b).size / k
    return {"pearson": r, "top_overlap": float(overlap), "constant_field": constant,
            "top_cells": k}


def cmd_compare(cfg: ExperimentConfig) -> dict:
    """Quantum invariant Husimi field against the classical attractor histogram."""
    inputs = cfg.inputs or {}
    if "quantum" in inputs:
        q = io.read_grid_csv(inputs["quantum"], "value")
    else:
        base = dict(cfg.channel or {"type": "sdc", "eps": 0.4, "alpha": 1.0 / cfg.n})
        q = _invariant_panel(cfg, base)[0].values
    if "classical" in inputs:
        c = io.read_grid_csv(inputs["classical"], "count")
    else:
        c = _classical_hist(cfg).counts
    result = compare_fields(q, c, cfg.thresholds["top_fraction"])
    result["classical_occupied_fraction"] = float(np.count_nonzero(c)) / c.size
    summary = {"config": cfg.provenance(), **result}
    io.write_json(cfg.path("compare.json"), summary)
    return summary


def channel_report(ch, subleading: bool | None = None) -> dict:
    N = ch.N
    rep = affine_representation(ch, first_column_only=N > 32)
    v1_sq = eta_from_affine(rep)
    out = {"n": N, "tp_residual": check_tp(ch), "unital": is_unital(ch), "eta": eta(ch),
           "eta_from_purity": eta_from_purity(ch), "eta_from_affine": v1_sq,
           "v1_norm_sq": v1_sq, "kraus_count": len(ch)}
    if subleading if subleading is not None else N <= 16:
        out["subleading_modulus"] = subleading_modulus(ch)
    return out


def cmd_report(cfg: ExperimentConfig) -> dict:
    """Non-unitality summary of a single channel."""
    ch = _channel(cfg)
    summary = {"config": cfg.provenance(),
               **channel_report(ch, cfg.options.get("subleading"))}
    io.write_json(cfg.path("report.json"), summary)
    return summary


RUNNERS = {"eta-sweep": cmd_eta_sweep, "gamma-map": cmd_gamma_map,
           "invariant": cmd_invariant, "classical": cmd_classical,
           "compare": cmd_compare, "report": cmd_report}


def run(cfg: ExperimentConfig) -> dict:
    return RUNNERS[cfg.command](cfg)
