"""Command-line entry point.

    mns converge|stability|stir|run [--config PATH] [--out DIR]
        [--nu X --nur X --tau X --h X --T X ...]

Config files are flat key=value text or JSON with the same keys; inline
flags override file values. Output directory resolution: --out flag, then
the MNS_OUT_DIR environment variable, then the current directory.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import experiments, io, stepper

# recognized config keys with defaults; jmath/c1/c2 carry the standard
# experiment values, h the desk-scale resolution
DEFAULTS = {
    "nu": 1.0,
    "nur": 1.0,
    "jmath": 1.0,
    "c1": 2.0,
    "c2": 1.0,
    "h": 1.0 / 64,
    "tau": 0.1,
    "T": None,  # per-subcommand default
    "tau_list": None,
}

CONVERGE_TAUS = [0.2, 0.1, 0.05, 0.025]
STABILITY_TAUS = [1.0, 0.1, 0.01]


@dataclass
class RunSpec:
    subcommand: str
    params: dict
    out_dir: Path


class ConfigError(ValueError):
    pass


def _parse_value(key, raw):
    if key == "tau_list":
        if isinstance(raw, (list, tuple)):
            return [float(v) for v in raw]
        return [float(v) for v in str(raw).split()]
    return float(raw)


def _read_config_file(path):
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return dict(data)
    data = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        data[key.strip()] = value.strip()
    return data


def parse_config(subcommand, config_path=None, overrides=None, out_dir=None):
    """Merge defaults, config file, and inline overrides into a RunSpec.

    Unknown keys are rejected; physical parameters are validated by the
    Config invariants when the run is built.
    """
    params = dict(DEFAULTS)
    merged = {}
    if config_path:
        merged.update(_read_config_file(config_path))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    for key, raw in merged.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            params[key] = _parse_value(key, raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc

    if params["T"] is None:
        params["T"] = {"converge": 1.0, "stability": 5.0, "stir": 25.0,
                       "run": 5.0}[subcommand]
    if params["tau_list"] is None:
        params["tau_list"] = {
            "converge": CONVERGE_TAUS,
            "stability": STABILITY_TAUS,
        }.get(subcommand)
    if subcommand == "stir" and "tau" not in merged:
        params["tau"] = 0.01

    out = Path(out_dir or os.environ.get("MNS_OUT_DIR") or ".")
    return RunSpec(subcommand=subcommand, params=params, out_dir=out)


def _build_config(spec, bounds=(0.0, 1.0, 0.0, 1.0), **extra):
    p = spec.params
    extent = bounds[1] - bounds[0]
    n_cells = max(1, round(extent / p["h"]))
    try:
        return stepper.Config(
            nu=p["nu"], nu_r=p["nur"], T=p["T"], tau=p["tau"], n_cells=n_cells,
            jmath=p["jmath"], c1=p["c1"], c2=p["c2"], bounds=bounds, **extra,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def run_spec(spec):
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    if spec.subcommand == "converge":
        cfg = _build_config(spec)
        report = experiments.run_convergence(cfg, spec.params["tau_list"])
        path = spec.out_dir / "convergence.csv"
        io.write_csv_table(report, path)
        print(f"wrote {path}")
    elif spec.subcommand == "stability":
        cfg = _build_config(spec)
        series_list = experiments.run_stability(cfg, spec.params["tau_list"])
        for series in series_list:
            path = spec.out_dir / f"energy_tau{series.tau:g}.csv"
            io.write_energy_series(series, path)
            print(f"wrote {path}")
    elif spec.subcommand == "stir":
        cfg = _build_config(spec, bounds=(-1.0, 1.0, -1.0, 1.0))
        result = experiments.run_stirring(cfg)
        for t, phi in result.snapshots:
            path = spec.out_dir / f"stirring_t{t:g}.vtk"
            io.write_vtk_field([phi], path, names=["phi"])
            print(f"wrote {path}")
        print(f"phi range [{result.phi_min:.6f}, {result.phi_max:.6f}]")
    elif spec.subcommand == "run":
        cfg = _build_config(spec)
        series_list = experiments.run_stability(cfg, [spec.params["tau"]])
        path = spec.out_dir / "energy.csv"
        io.write_energy_series(series_list[0], path)
        print(f"wrote {path}")
    else:
        raise ConfigError(f"unknown subcommand {spec.subcommand!r}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mns",
        description="2D micropolar Navier-Stokes solver (energy-stable IMEX "
                    "stepping with a scalar auxiliary variable)",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_ in [
        ("converge", "manufactured-solution temporal convergence table"),
        ("stability", "zero-forcing energy-decay runs"),
        ("stir", "passive-scalar stirring driven by an applied torque"),
        ("run", "single simulation with energy diagnostics"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key=value or JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--nu", type=float)
        p.add_argument("--nur", type=float)
        p.add_argument("--tau", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--T", type=float)
        p.add_argument("--jmath", type=float)
        p.add_argument("--c1", type=float)
        p.add_argument("--c2", type=float)

    args = parser.parse_args(argv)
    overrides = {k: getattr(args, k) for k in
                 ("nu", "nur", "tau", "h", "T", "jmath", "c1", "c2")}
    try:
        spec = parse_config(args.subcommand, config_path=args.config,
                            overrides=overrides, out_dir=args.out)
        run_spec(spec)
    except ConfigError as exc:
        print(f"mns: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
