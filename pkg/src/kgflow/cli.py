"""Configuration-driven experiment pipelines.

Subcommands: check-null, simulate, extract-profile, fit-scattering,
moyal-bench, opnorm-bench.  Each reads a JSON configuration, echoes the
fully-defaulted configuration it actually used into the output
directory, and writes CSV/JSON artifacts with stable formatting so that
identical configurations and seeds produce byte-identical files.

Exit codes: 0 success, 1 runtime abort (blow-up guard or non-finite
state, with partial outputs flushed), 2 configuration error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Configuration failed schema validation."""


# ---------------------------------------------------------------------------
# configuration handling

_DEFAULTS = {
    "nonlinearity": [],
    "grid": {"n": 4096, "half_length": 100.0},
    "solver": {"dt": None, "t_end": 50.0, "epsilon": 0.05,
               "data_kind": "gaussian", "sobolev_s": 4.0},
    "frame": {"M": 1024, "X": 1.2},
    "profile": {"stations": [0.0], "delta0": 0.05},
    "bench": {"h_exponents": [4, 5, 6, 7, 8, 9], "M": [512, 512, 512, 1024, 1024, 2048],
              "X": 2.5, "orders": [0, 1, 2], "width": 0.5,
              "target": "L2_to_Linf"},
    "seed": 0,
}


def _merge(defaults, override, path="config"):
    if isinstance(defaults, dict):
        if not isinstance(override, dict):
            raise ConfigError(f"{path} must be an object")
        out = copy.deepcopy(defaults)
        for key, value in override.items():
            if key in defaults and isinstance(defaults[key], dict):
                out[key] = _merge(defaults[key], value, f"{path}.{key}")
            else:
                out[key] = copy.deepcopy(value)
        return out
    return copy.deepcopy(override)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a JSON object")
    return _merge(_DEFAULTS, raw)


def _build_nonlinearity(cfg):
    from .nonlinearity import (CubicNonlinearity, DegreeError,
                               QuasiLinearityError)

    records = cfg.get("nonlinearity", [])
    if not isinstance(records, list):
        raise ConfigError("nonlinearity must be a list of monomial records")
    if not records:
        return None
    try:
        return CubicNonlinearity.from_records(records)
    except (DegreeError, QuasiLinearityError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid nonlinearity: {exc}") from exc


def _build_grid(cfg):
    from .spectral import Grid1D

    g = cfg["grid"]
    try:
        return Grid1D(int(g["n"]), float(g["half_length"]))
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def _build_solver_config(cfg, grid):
    from .solver import SolverConfig, default_dt

    s = cfg["solver"]
    dt = s.get("dt")
    if dt is None:
        dt = default_dt(grid)
        cfg["solver"]["dt"] = dt
    try:
        sc = SolverConfig(dt=float(dt), t_end=float(s["t_end"]),
                          epsilon=float(s["epsilon"]),
                          data_kind=str(s["data_kind"]),
                          sobolev_s=float(s["sobolev_s"]))
        sc.validate(grid)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid solver config: {exc}") from exc
    return sc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(cfg, out: Path):
    with open(out / "resolved_config.json", "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_null(cfg, out: Path) -> int:
    from .nonlinearity import check_null

    P = _build_nonlinearity(cfg)
    if P is None:
        raise ConfigError("check-null requires a nonlinearity")
    report = check_null(P)
    payload = {
        "verdict": bool(report.verdict),
        "q_coefficients": [str(c) for c in report.q_coeffs],
        "phi1_description": repr(report.phi1),
    }
    _echo_config(cfg, out)
    with open(out / "null_report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


_NORM_COLUMNS = ["t", "linf_u", "sqrt_t_linf", "E0", "EZ1", "Hs"]


def _flush_norms(rows, out: Path):
    _write_csv(out / "norms.csv", _NORM_COLUMNS,
               [[row[c] for c in _NORM_COLUMNS] for row in rows])


def cmd_simulate(cfg, out: Path) -> int:
    from .solver import BlowupError, NaNError, run

    P = _build_nonlinearity(cfg)
    grid = _build_grid(cfg)
    sc = _build_solver_config(cfg, grid)
    _echo_config(cfg, out)
    try:
        rows, state = run(grid, P, sc)
    except (BlowupError, NaNError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        rows = getattr(exc, "partial_rows", [])
        _flush_norms(rows, out)
        return 1
    _flush_norms(rows, out)
    _write_csv(out / "snapshot_final.csv", ["x", "u", "ut"],
               zip(grid.x, state.u, state.ut))
    return 0


def _station_series(cfg):
    from .profile import StationRecorder
    from .solver import run

    P = _build_nonlinearity(cfg)
    grid = _build_grid(cfg)
    sc = _build_solver_config(cfg, grid)
    stations = cfg["profile"]["stations"]
    if not stations:
        raise ConfigError("station list is empty")
    try:
        recorder = StationRecorder(stations)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows, _ = run(grid, P, sc, observers=[recorder])
    return P, recorder.series, rows


def cmd_extract_profile(cfg, out: Path) -> int:
    from .profile import phi_fn
    from .solver import BlowupError, NaNError

    _echo_config(cfg, out)
    try:
        _, series, _ = _station_series(cfg)
    except (BlowupError, NaNError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1
    times = np.asarray(series.times)
    values = np.asarray(series.values)
    phi = phi_fn(series.stations)
    # unwrapped phase minus t*phi(x): the quantity whose log-t slope the
    # scattering fit measures, precomputed so plots stay file-to-file
    residual = np.unwrap(np.angle(values), axis=0) - times[:, None] * phi
    rows = []
    for i, t in enumerate(times):
        for j, x in enumerate(series.stations):
            z = values[i, j]
            rows.append([float(t), float(x), z.real, z.imag,
                         float(residual[i, j])])
    _write_csv(out / "profile.csv",
               ["t", "x_station", "re", "im", "phase_residual"], rows)
    return 0


def cmd_fit_scattering(cfg, out: Path) -> int:
    from .profile import (InsufficientData, UnwrapError,
                          fit_modified_scattering, phi1_field, phi_fn)
    from .solver import BlowupError, NaNError

    _echo_config(cfg, out)
    try:
        P, series, _ = _station_series(cfg)
    except (BlowupError, NaNError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1
    stations = series.stations
    phi1 = phi1_field(P, stations)
    try:
        fit = fit_modified_scattering(series, phi_fn(stations),
                                      phi1_values=phi1,
                                      epsilon=cfg["solver"]["epsilon"])
    except (InsufficientData, UnwrapError) as exc:
        raise ConfigError(str(exc)) from exc
    _write_csv(out / "fit.csv",
               ["x_station", "amplitude", "phase_slope", "predicted_slope",
                "relative_error", "residual_rms"],
               zip(fit.stations, fit.amplitude, fit.phase_slope,
                   fit.predicted_slope, fit.relative_error, fit.residual_rms))
    return 0


def _bench_symbols(width):
    from .semiclassical import symbol

    w = float(width)
    a = symbol(lambda x, xi, h: np.exp(-((x / w) ** 2 + (xi / w) ** 2)),
               name="gaussian")
    b = symbol(lambda x, xi, h: np.exp(-(((x - 0.2) / w) ** 2
                                         + ((xi - 0.3) / w) ** 2)),
               name="gaussian-shifted")
    return a, b


def _bench_params(cfg):
    bench = cfg["bench"]
    h_list = [2.0 ** -int(e) for e in bench["h_exponents"]]
    M = bench["M"]
    if not np.isscalar(M) and len(M) != len(h_list):
        raise ConfigError("bench.M must be scalar or match h_exponents")
    return h_list, M, float(bench["X"])


def cmd_moyal_bench(cfg, out: Path) -> int:
    from .semiclassical import moyal_error

    h_list, M, X = _bench_params(cfg)
    a, b = _bench_symbols(cfg["bench"]["width"])
    _echo_config(cfg, out)
    rows = []
    for k in cfg["bench"]["orders"]:
        errors, slope = moyal_error(a, b, int(k), h_list, M=M, X=X,
                                    seed=int(cfg["seed"]))
        for h, err in zip(h_list, errors):
            rows.append([int(k), h, err, slope])
    _write_csv(out / "moyal_bench.csv", ["k", "h", "error", "fitted_slope"],
               rows)
    return 0


def cmd_opnorm_bench(cfg, out: Path) -> int:
    from .semiclassical import lambda_cutoff, opnorm_probe, symbol
    from .spectral import chi_plateau

    h_list, M, X = _bench_params(cfg)
    target = cfg["bench"]["target"]
    gamma = lambda_cutoff(1.0, 0.5)
    probe = symbol(lambda x, xi, h: chi_plateau(np.asarray(x) / 0.45)
                   * gamma(x, xi, h), name="interior-lagrangian")
    _echo_config(cfg, out)
    try:
        norms, slope = opnorm_probe(probe, h_list, target=target, M=M, X=X,
                                    seed=int(cfg["seed"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [[target, h, n, slope] for h, n in zip(h_list, norms)]
    _write_csv(out / "opnorm_bench.csv", ["target", "h", "norm", "fitted_slope"],
               rows)
    return 0


_COMMANDS = {
    "check-null": cmd_check_null,
    "simulate": cmd_simulate,
    "extract-profile": cmd_extract_profile,
    "fit-scattering": cmd_fit_scattering,
    "moyal-bench": cmd_moyal_bench,
    "opnorm-bench": cmd_opnorm_bench,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kgflow", description="Klein-Gordon scattering laboratory")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="BLAS/FFT thread cap")
    args = parser.parse_args(argv)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(args.threads))
    try:
        cfg = load_config(args.config)
        out = _out_dir(args)
        return _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
