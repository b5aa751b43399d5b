"""Command-line front end: ``lindblad-skin <task> --config <path> [--out <dir>]``.

The config is a JSON object with the keys ``task``, ``model``, ``evolve``,
``output``, ``scan`` and ``kspace``; only ``model`` is required. Unknown keys
anywhere are rejected. Site labels in output files are one-based.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import itertools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import damping, kspace, ness, oracle
from .dynamics import (InitialGaussianState, adjoint_two_point_table, delta_g_timeseries,
                       evolve_correlation, f2_coefficients, interference_amplitudes)
from .errors import ConfigError, LindbladSkinError, NumericalFailure, SizeLimit
from .majorana import majorana_form
from .model import BoundaryCondition, SshParams, ssh_model
from .thirdq import decompose

TASKS = ("spectrum", "ness", "modes", "evolve", "kspace", "skin-scan", "oracle-check")
INITIAL_STATES = ("unit_filling", "ness")
FORMATS = ("csv", "json")
ORACLE_TOL = 1e-7
STANDARD_ANGLES = {"theta": np.pi / 4, "phi": -np.pi / 2, "theta_p": np.pi / 4, "phi_p": np.pi / 2}
_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SshParams))


@dataclass(frozen=True)
class EvolveConfig:
    t_max: float = 20.0
    samples: int = 200
    initial: str | dict = "unit_filling"

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.samples)


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class KspaceConfig:
    k_points: int | None = None
    probe_k: float = 0.3
    probe_t: float = 1.5


@dataclass(frozen=True)
class RunConfig:
    model: SshParams
    boundary: BoundaryCondition = BoundaryCondition.OPEN
    task: str | None = None
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    scan: dict = field(default_factory=dict)
    kspace: KspaceConfig = field(default_factory=KspaceConfig)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "RunConfig":
        _check_keys(raw, {"task", "model", "evolve", "output", "scan", "kspace"}, "config")
        if "model" not in raw:
            raise ConfigError("missing required key 'model'", module="cli")
        model_raw = dict(_require_mapping(raw["model"], "model"))
        _check_keys(model_raw, set(_PARAM_FIELDS) | {"boundary"}, "model")
        try:
            boundary = BoundaryCondition(model_raw.pop("boundary", "open"))
        except ValueError:
            raise ConfigError("model.boundary must be 'open' or 'periodic'", module="cli") from None
        try:
            params = SshParams(**model_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid model: {exc}", module="cli") from None

        task = raw.get("task")
        if task is not None and task not in TASKS:
            raise ConfigError(f"unknown task {task!r}", module="cli")
        evolve = _section(EvolveConfig, raw.get("evolve", {}), "evolve")
        if not isinstance(evolve.samples, int) or evolve.samples < 2:
            raise ConfigError("evolve.samples must be an integer >= 2", module="cli")
        if not evolve.t_max > 0:
            raise ConfigError("evolve.t_max must be positive", module="cli")
        evolve = dataclasses.replace(evolve, initial=_parse_initial(evolve.initial, base_dir))
        output = _section(OutputConfig, raw.get("output", {}), "output")
        if output.format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}", module="cli")
        scan = dict(_require_mapping(raw.get("scan", {}), "scan"))
        _check_keys(scan, set(_PARAM_FIELDS) - {"n_cells"}, "scan")
        for key, values in scan.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"scan.{key} must be a non-empty list", module="cli")
        ks = _section(KspaceConfig, raw.get("kspace", {}), "kspace")
        if ks.k_points is not None and (not isinstance(ks.k_points, int) or ks.k_points < 1):
            raise ConfigError("kspace.k_points must be a positive integer", module="cli")
        return cls(params, boundary, task, evolve, output, scan, ks)

    def to_dict(self) -> dict:
        model = dataclasses.asdict(self.model)
        model["boundary"] = self.boundary.value
        out = {"model": model, "evolve": dataclasses.asdict(self.evolve),
               "output": dataclasses.asdict(self.output), "scan": self.scan,
               "kspace": dataclasses.asdict(self.kspace)}
        if self.task is not None:
            out["task"] = self.task
        return out


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a JSON object", module="cli")
    return value


def _check_keys(raw: dict, allowed: set, where: str):
    unknown = sorted(set(_require_mapping(raw, where)) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}", module="cli")


def _section(kind, raw, where: str):
    raw = _require_mapping(raw, where)
    _check_keys(raw, {f.name for f in dataclasses.fields(kind)}, where)
    return kind(**raw)


def _parse_initial(initial, base_dir: Path | None):
    if isinstance(initial, str):
        if initial not in INITIAL_STATES:
            raise ConfigError(f"evolve.initial must be one of {INITIAL_STATES} or "
                              "{'custom_covariance': path}", module="cli")
        return initial
    initial = _require_mapping(initial, "evolve.initial")
    _check_keys(initial, {"custom_covariance"}, "evolve.initial")
    path = Path(initial.get("custom_covariance", ""))
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"covariance file {path} not found", module="cli")
    return {"custom_covariance": str(path)}


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", module="cli") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", module="cli") from None
    return RunConfig.from_dict(raw, path.parent)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def _load_covariance(path: str) -> np.ndarray:
    """``.npy`` array, or JSON with ``real`` and optional ``imag`` nested lists."""
    if path.endswith(".npy"):
        return np.load(path)
    data = json.loads(Path(path).read_text())
    if isinstance(data, list):
        return np.array(data, dtype=complex)
    return np.array(data["real"]) + 1j * np.array(data.get("imag", 0.0))


def _initial_state(cfg: RunConfig, n_modes: int) -> InitialGaussianState | None:
    """``None`` means the steady state itself."""
    init = cfg.evolve.initial
    if init == "unit_filling":
        return InitialGaussianState.unit_filling(n_modes)
    if init == "ness":
        return None
    C = _load_covariance(init["custom_covariance"])
    if C.shape != (2 * n_modes, 2 * n_modes):
        raise ConfigError(f"custom covariance must be {2 * n_modes}x{2 * n_modes}", module="cli")
    return InitialGaussianState(C)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def write_table(out_dir: Path, name: str, columns, rows, fmt: str = "csv") -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out_dir / f"{name}.json"
        records = [dict(zip(columns, map(_jsonable, row))) for row in rows]
        path.write_text(json.dumps({"columns": list(columns), "rows": records}, indent=1) + "\n")
        return path
    path = out_dir / f"{name}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def _decomposition(cfg: RunConfig):
    return decompose(majorana_form(ssh_model(cfg.model, cfg.boundary)))


def _has_standard_angles(p: SshParams) -> bool:
    return all(np.isclose(getattr(p, k), v, atol=1e-15) for k, v in STANDARD_ANGLES.items())


def _k_points(cfg: RunConfig) -> np.ndarray:
    return kspace.k_grid(cfg.kspace.k_points or cfg.model.n_cells)


def task_spectrum(cfg: RunConfig, out: Path) -> list[Path]:
    rows = []
    if cfg.boundary is BoundaryCondition.PERIODIC:
        for k in _k_points(cfg):
            if _has_standard_angles(cfg.model):
                values = kspace.closed_form_eigenvalues(cfg.model, k)
            else:
                b = kspace.numeric_rapidities(cfg.model, k)
                values = np.concatenate([b, -b])
            rows += [(k, v.real, v.imag) for v in values]
    else:
        rows = [(i, b.real, b.imag) for i, b in enumerate(_decomposition(cfg).betas)]
    return [write_table(out, "spectrum", ("k_or_index", "re", "im"), rows, cfg.output.format)]


def task_ness(cfg: RunConfig, out: Path) -> list[Path]:
    model = ssh_model(cfg.model, cfg.boundary)
    occ = ness.ness_occupations(decompose(majorana_form(model)), model)
    rows = [(m + 1, g) for m, g in enumerate(occ)]
    return [write_table(out, "ness", ("site", "occupation"), rows, cfg.output.format)]


def task_modes(cfg: RunConfig, out: Path) -> list[Path]:
    dec = _decomposition(cfg)
    deltas = ness.all_mode_deltas(dec)
    rows = [(n, b.real, b.imag, m + 1, deltas[n, m].real)
            for n, b in enumerate(dec.betas) for m in range(dec.n_modes)]
    return [write_table(out, "modes", ("mode", "beta_re", "beta_im", "site", "delta"), rows,
                        cfg.output.format)]


def emit_frequency_amplitude_report(spec, out: Path, fmt: str = "csv") -> Path:
    """Pairs sorted by decreasing imaginary frequency, one block of rows per site."""
    s = spec.sorted_by_frequency()
    rows = [(p + 1, s.omegas[p].imag, site + 1, s.D[p, col].real, s.D[p, col].imag)
            for col, site in enumerate(s.sites) for p in range(s.omegas.size)]
    return write_table(out, "frequencies", ("pair_index", "omega_im", "site", "re_D", "im_D"),
                       rows, fmt)


def task_evolve(cfg: RunConfig, out: Path) -> list[Path]:
    dec = _decomposition(cfg)
    n = dec.n_modes
    times = cfg.evolve.times()
    state = _initial_state(cfg, n)
    if state is None:
        values = np.zeros((times.size, n))
        paths = []
    else:
        spec = interference_amplitudes(dec, f2_coefficients(dec, adjoint_two_point_table(state)))
        values = delta_g_timeseries(spec, times).values
        paths = [emit_frequency_amplitude_report(spec, out, cfg.output.format)]
    rows = [(t, m + 1, values[i, m]) for i, t in enumerate(times) for m in range(n)]
    return [write_table(out, "evolve", ("t", "site", "delta_g"), rows, cfg.output.format)] + paths


def task_kspace(cfg: RunConfig, out: Path) -> list[Path]:
    times = cfg.evolve.times()
    rows = []
    for k in _k_points(cfg):
        occ = kspace.k_occupations(cfg.model, k, times)
        rows += [(t, k, a, b) for t, (a, b) in zip(times, occ)]
    paths = [write_table(out, "kspace", ("t", "k", "g_a", "g_b"), rows, cfg.output.format)]
    if cfg.model.gamma_minus == 0 and cfg.model.gamma_plus > 0:
        cal = kspace.calibrate_eom_gamma(cfg.model, cfg.kspace.probe_k, cfg.kspace.probe_t)
        rows = [(cal.probe_k, cal.probe_t, cal.gamma, cal.ratio, cal.residual)]
        paths.append(write_table(out, "kspace_calibration",
                                 ("probe_k", "probe_t", "gamma", "ratio", "residual"), rows,
                                 cfg.output.format))
    return paths


def task_skin_scan(cfg: RunConfig, out: Path) -> list[Path]:
    if not cfg.scan:
        raise ConfigError("skin-scan needs a non-empty 'scan' section", module="cli")
    keys = list(cfg.scan)
    rows = []
    for values in itertools.product(*(cfg.scan[k] for k in keys)):
        try:
            p = dataclasses.replace(cfg.model, **dict(zip(keys, values)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid scan point {dict(zip(keys, values))}: {exc}",
                              module="cli") from None
        rows.append((*values, damping.skin_absent(p), damping.skin_residual(p)))
    return [write_table(out, "skin_scan", (*keys, "skin_absent", "residual"), rows,
                        cfg.output.format)]


def task_oracle_check(cfg: RunConfig, out: Path) -> list[Path]:
    model = ssh_model(cfg.model, cfg.boundary)
    if model.n_modes > oracle.MAX_PHYSICAL_MODES:
        raise SizeLimit(f"oracle-check is limited to {oracle.MAX_PHYSICAL_MODES} modes",
                        module="oracle")
    n = model.n_modes
    state = _initial_state(cfg, n)
    if state is None:
        raise ConfigError("oracle-check needs an explicit initial state", module="cli")
    times = cfg.evolve.times()
    G0 = state.correlation()
    try:
        rho0 = oracle.gaussian_density_matrix(G0)
    except ValueError as exc:
        raise ConfigError(str(exc), module="cli") from None
    dec = decompose(majorana_form(model))
    adj = evolve_correlation(dec, state, times)
    rows, worst = [], 0.0
    routes = {"adjoint": adj}
    if model.conserves_particle_number:
        routes["damping"] = damping.correlation_timeseries(model, G0, times)
    for i, t in enumerate(times):
        ref = oracle.correlation_matrix(oracle.dense_evolve(model, rho0, t))
        for name, G in routes.items():
            dev = float(np.abs(G[i] - ref).max())
            worst = max(worst, dev)
            rows.append((t, name, dev))
    path = write_table(out, "oracle_check", ("t", "method", "max_abs_dev"), rows, cfg.output.format)
    if worst > ORACLE_TOL:
        raise NumericalFailure(f"dense evolution deviates by {worst:.3e}", module="oracle",
                               tolerance=ORACLE_TOL)
    return [path]


HANDLERS = {
    "spectrum": task_spectrum,
    "ness": task_ness,
    "modes": task_modes,
    "evolve": task_evolve,
    "kspace": task_kspace,
    "skin-scan": task_skin_scan,
    "oracle-check": task_oracle_check,
}


def run(task: str, config_path, out_dir=None) -> list[Path]:
    cfg = load_config(config_path)
    if cfg.task is not None and cfg.task != task:
        raise ConfigError(f"config is for task {cfg.task!r}, not {task!r}", module="cli")
    out = Path(out_dir if out_dir is not None else cfg.output.dir)
    return HANDLERS[task](cfg, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lindblad-skin", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    args = parser.parse_args(argv)
    try:
        paths = run(args.task, args.config, args.out)
    except (ConfigError, SizeLimit) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LindbladSkinError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
