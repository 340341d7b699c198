"""Command-line front end.

Subcommands: ``sweep`` (quasi-energy spectrum vs drive frequency),
``dynamics`` (two-level time evolution), ``pde`` (full field simulation of
the shaken double well), ``ep-find`` (exceptional-point search) and
``coupler`` (directional-coupler mode selection).  All numeric output goes
to CSV/JSON files whose first line carries a schema hash and a hash of the
full effective configuration, so plots are traceable to runs.  Identical
configurations produce byte-identical output.

Options may also be supplied through an INI file (``--config``); explicit
command-line flags take precedence over the file, which takes precedence
over built-in defaults.  Exit codes: 0 success, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import coupler as coupler_mod
from . import pde as pde_mod
from . import twolevel
from .errors import FloquetWellError
from .hierarchy import build_matrix, solve_quasi_energies
from .twolevel import DriveSpec, ShakingPath
from .well import GridSpec, WellSpec

_CSV_VERSION = "v1"


def _complex_arg(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from exc


def _pair_arg(s: str):
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values")
    return (_complex_arg(parts[0]), _complex_arg(parts[1]))


# mode -> option name -> (converter, default)
_SCHEMAS: dict[str, dict[str, tuple]] = {
    "sweep": {
        "v1": (_complex_arg, 0.5 + 0j),
        "v2": (_complex_arg, 0.5 + 0j),
        "omega0": (float, 1.0),
        "eps_min": (float, 0.1),
        "eps_max": (float, 1.1),
        "eps_steps": (int, 200),
        "n_samples": (int, 128),
        "rtol": (float, twolevel.DEFAULT_RTOL),
        "atol": (float, twolevel.DEFAULT_ATOL),
        "workers": (int, 1),
    },
    "dynamics": {
        "v1": (_complex_arg, 0.5 + 0j),
        "v2": (_complex_arg, 0.5 + 0j),
        "omega0": (float, 1.0),
        "eps": (float, 0.2),
        "a0": (_pair_arg, (1 + 0j, 0j)),
        "t_final": (float, 1000.0),
        "record_every": (float, 10.0),
        "rtol": (float, twolevel.DEFAULT_RTOL),
        "atol": (float, twolevel.DEFAULT_ATOL),
    },
    "pde": {
        "sigma1": (float, float(np.sqrt(3.0))),
        "sigma2": (float, float(np.sqrt(2.0))),
        "shaking": (str, "hermitian"),
        "amplitude": (float, 1.0),
        "eps": (float, 1.0 / 3.0),
        "x_min": (float, -8.0),
        "x_max": (float, 8.0),
        "n_points": (int, 256),
        "dt": (float, 0.01),
        "t_final": (float, 1000.0),
        "sample_every": (float, 10.0),
        "snapshot_every": (float, 0.0),
        "snapshot_prefix": (str, ""),
    },
    "ep-find": {
        "backend": (str, "twolevel"),
        "v1": (_complex_arg, 0j),
        "v2": (_complex_arg, 0.5j),
        "omega0": (float, 1.0),
        "eps_min": (float, 0.19),
        "eps_max": (float, 0.21),
        "scan_points": (int, 41),
        "rtol": (float, 1e-12),
        "atol": (float, 1e-14),
        # pde backend only:
        "sigma1": (float, float(np.sqrt(3.0))),
        "sigma2": (float, float(np.sqrt(2.0))),
        "amplitude": (float, 0.6),
        "x_min": (float, -8.0),
        "x_max": (float, 8.0),
        "n_points": (int, 256),
        "dt": (float, 0.01),
        "t_final": (float, 20000.0),
        "sample_every": (float, 20.0),
    },
    "coupler": {
        "kappa_e": (float, 0.5),
        "eps": (float, 1.0 / 3.0),
        "v": (_complex_arg, 0.5 + 0j),
        "profile": (str, "one-sided-exp"),
        "b0": (_pair_arg, (1 + 0j, 0j)),
        "z_final": (float, 2000.0),
        "record_every": (float, 0.0),  # 0 -> one drive period
    },
}


@dataclass
class RunConfig:
    """Effective configuration of one run (mode plus resolved parameters)."""

    mode: str
    params: dict

    def canonical(self) -> str:
        items = []
        for key in sorted(self.params):
            items.append(f"{key}={_fmt_value(self.params[key])}")
        return self.mode + ";" + ";".join(items)

    def digest(self) -> str:
        return hashlib.sha1(self.canonical().encode()).hexdigest()[:16]

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp[self.mode] = {k: _fmt_value(v) for k, v in sorted(self.params.items())}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _fmt_value(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_fmt_value(x) for x in v)
    if isinstance(v, complex):
        return repr(v).strip("()")
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_from_ini(text: str, mode: str) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    if mode not in cp:
        raise ValueError(f"config file has no [{mode}] section")
    schema = _SCHEMAS[mode]
    params = {}
    for key, (conv, default) in schema.items():
        if key in cp[mode]:
            params[key] = conv(cp[mode][key])
        else:
            params[key] = default
    return RunConfig(mode=mode, params=params)


def _resolve_config(mode: str, args: argparse.Namespace) -> RunConfig:
    schema = _SCHEMAS[mode]
    params = {k: default for k, (_, default) in schema.items()}
    if args.config:
        with open(args.config) as fh:
            file_cfg = config_from_ini(fh.read(), mode)
        params.update(file_cfg.params)
    for key in schema:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            params[key] = val
    return RunConfig(mode=mode, params=params)


def _fmt_float(x) -> str:
    return repr(float(x))


def _write_csv(path: str, mode: str, columns: list[str], rows, config: RunConfig):
    header = ",".join(columns)
    schema_hash = hashlib.sha1(f"{mode}:{header}".encode()).hexdigest()[:16]
    lines = [
        f"# floquet-well {mode} {_CSV_VERSION} schema={schema_hash} config={config.digest()}",
        header,
    ]
    for row in rows:
        lines.append(",".join(_fmt_float(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _sweep_row(task):
    eps, v1, v2, omega0, n_samples, rtol, atol = task
    drive = DriveSpec(v1, v2, omega0, eps)
    mono = twolevel.monodromy(drive, rtol=rtol, atol=atol)
    try:
        s1, _ = twolevel.floquet_states(drive, mono, n_samples, rtol=rtol, atol=atol)
        theta = twolevel.unbalance_factor(s1)
    except FloquetWellError:
        theta = float("nan")
    return (
        eps,
        float(np.real(mono.mu1)),
        float(np.real(mono.mu2)),
        mono.folded_gap,
        theta,
        mono.defect,
    )


def _cmd_sweep(config: RunConfig, out: str) -> int:
    p = config.params
    if p["eps_steps"] < 1 or p["eps_max"] <= p["eps_min"] or p["eps_min"] <= 0:
        raise ValueError("invalid sweep range")
    eps_grid = np.linspace(p["eps_min"], p["eps_max"], p["eps_steps"])
    tasks = [
        (float(e), p["v1"], p["v2"], p["omega0"], p["n_samples"], p["rtol"], p["atol"])
        for e in eps_grid
    ]
    if p["workers"] > 1:
        with ProcessPoolExecutor(max_workers=p["workers"]) as ex:
            rows = list(ex.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    _write_csv(out, "sweep", ["eps", "mu1_folded", "mu2_folded", "gap", "theta", "defect"],
               rows, config)
    return 0


def _cmd_dynamics(config: RunConfig, out: str) -> int:
    p = config.params
    drive = DriveSpec(p["v1"], p["v2"], p["omega0"], p["eps"])
    rec = twolevel.propagate(
        drive, np.array(p["a0"]), p["t_final"], p["record_every"],
        rtol=p["rtol"], atol=p["atol"],
    )
    rows = zip(rec.times, rec.a1_sq, rec.a2_sq, rec.norm)
    _write_csv(out, "dynamics", ["t", "pop1", "pop2", "norm"], rows, config)
    return 0


def _path_from_params(p) -> ShakingPath:
    A, eps = p["amplitude"], p["eps"]
    if p["shaking"] == "hermitian":
        return ShakingPath(A1=A / 2, A2=A / 2, eps=eps)
    if p["shaking"] == "one-sided":
        return ShakingPath(A1=0.0, A2=1j * A, eps=eps)
    raise ValueError(f"unknown shaking kind {p['shaking']!r}")


def _cmd_pde(config: RunConfig, out: str) -> int:
    p = config.params
    spec = WellSpec(p["sigma1"], p["sigma2"])
    grid = GridSpec(p["x_min"], p["x_max"], p["n_points"], p["dt"])
    path = _path_from_params(p)
    if p["snapshot_every"] > 0:
        series = _pde_with_snapshots(spec, path, grid, p)
    else:
        series = pde_mod.run_experiment(
            spec, path, grid, p["t_final"], p["sample_every"]
        )
    leak = 1.0 - series.pop1 - series.pop2
    rows = zip(series.times, series.pop1, series.pop2, series.norm, leak)
    _write_csv(out, "pde", ["t", "pop1", "pop2", "norm", "leakage"], rows, config)
    return 0


def _pde_with_snapshots(spec, path, grid, p):
    """Stepwise evolution dumping binary field snapshots along the way."""
    field = pde_mod.init_ground_state(spec, grid)
    n_steps = int(round(p["t_final"] / grid.dt))
    stride = max(1, int(round(p["sample_every"] / grid.dt)))
    snap_stride = max(1, int(round(p["snapshot_every"] / grid.dt)))
    times, a1s, a2s, norms = [], [], [], []

    def record():
        a1, a2 = pde_mod.project(field, spec, path)
        times.append(field.t)
        a1s.append(a1)
        a2s.append(a2)
        norms.append(field.norm)

    record()
    for i in range(1, n_steps + 1):
        field = pde_mod.step(field, spec, path)
        if i % stride == 0 or i == n_steps:
            record()
        if i % snap_stride == 0:
            fname = f"{p['snapshot_prefix'] or 'psi'}_{i:08d}.bin"
            with open(fname, "wb") as fh:
                pde_mod.dump_snapshot(field, fh)
    pop1 = np.abs(a1s) ** 2
    pop2 = np.abs(a2s) ** 2
    return pde_mod.ProjectionSeries(
        times=np.array(times), a1=np.array(a1s), a2=np.array(a2s),
        pop1=pop1, pop2=pop2,
        leakage=1.0 - pop1 - pop2 if path.is_hermitian else None,
        norm=np.array(norms), eps=path.eps,
    )


def _ep_find_twolevel(p):
    drive0 = DriveSpec(p["v1"], p["v2"], p["omega0"], p["eps_min"])
    evals = 0

    def defect_at(e):
        nonlocal evals
        evals += 1
        return twolevel.monodromy(
            drive0.replace_eps(e), rtol=p["rtol"], atol=p["atol"]
        ).defect

    grid = np.linspace(p["eps_min"], p["eps_max"], p["scan_points"])
    defects = [defect_at(e) for e in grid]
    i0 = int(np.argmax(defects))
    a = grid[max(0, i0 - 1)]
    b = grid[min(len(grid) - 1, i0 + 1)]
    eps_star, _ = twolevel._golden_minimize(lambda e: -defect_at(e), a, b, 45)
    mono = twolevel.monodromy(drive0.replace_eps(eps_star), rtol=p["rtol"], atol=p["atol"])
    found = mono.is_defective
    residual = float("nan")
    if found:
        R = twolevel.floquet_generator(mono)
        q2 = twolevel.ep_eigenvector(mono)
        Q2 = twolevel.generalized_eigenvector(mono)
        residual = float(
            np.linalg.norm((R - 0.5 * mono.omega0 * np.eye(2)) @ Q2 - q2)
        )
    return {
        "eps_star": float(eps_star) if found else None,
        "defect": float(mono.defect),
        "gap": float(mono.folded_gap),
        "residual": residual,
        "iterations": evals,
        "ep_found": bool(found),
        "best_eps": float(eps_star),
    }


def _ep_find_pde(p):
    spec = WellSpec(p["sigma1"], p["sigma2"])
    grid = GridSpec(p["x_min"], p["x_max"], p["n_points"], p["dt"])
    eps_grid = np.linspace(p["eps_min"], p["eps_max"], p["scan_points"])
    paths = [ShakingPath(A1=0.0, A2=1j * p["amplitude"], eps=float(e)) for e in eps_grid]
    runs = pde_mod.run_scan(spec, paths, grid, p["t_final"], p["sample_every"])
    slopes, r2s = [], []
    for series in runs:
        t = series.times
        y = np.abs(series.a2)
        m = (t >= 0.05 * t[-1]) & (t <= 0.6 * t[-1])
        c = np.polyfit(t[m], y[m], 1)
        pred = np.polyval(c, t[m])
        ss_res = float(np.sum((y[m] - pred) ** 2))
        ss_tot = float(np.sum((y[m] - y[m].mean()) ** 2))
        slopes.append(float(c[0]))
        r2s.append(1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0)
    score = [s * max(r, 0.0) for s, r in zip(slopes, r2s)]
    i0 = int(np.argmax(score))
    found = slopes[i0] > 0 and r2s[i0] > 0.9
    # reduced-model spectral data at the winning frequency
    drive = DriveSpec(0.0, 1j * spec.kappa * p["amplitude"], spec.omega0, float(eps_grid[i0]))
    mono = twolevel.monodromy(drive, rtol=p["rtol"], atol=p["atol"])
    return {
        "eps_star": float(eps_grid[i0]) if found else None,
        "defect": float(mono.defect),
        "gap": float(mono.folded_gap),
        "residual": float("nan"),
        "iterations": int(p["scan_points"]),
        "ep_found": bool(found),
        "best_eps": float(eps_grid[i0]),
        "growth_slope": slopes[i0],
        "growth_r2": r2s[i0],
    }


def _cmd_ep_find(config: RunConfig, out: str) -> int:
    p = config.params
    if p["eps_max"] <= p["eps_min"] or p["eps_min"] <= 0:
        raise ValueError("invalid scan window")
    if p["backend"] == "twolevel":
        report = _ep_find_twolevel(p)
    elif p["backend"] == "pde":
        report = _ep_find_pde(p)
    else:
        raise ValueError(f"unknown backend {p['backend']!r}")
    report["backend"] = p["backend"]
    report["config"] = config.digest()
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_coupler(config: RunConfig, out: str) -> int:
    p = config.params
    spec = coupler_mod.CouplerSpec(p["kappa_e"], p["eps"], p["v"], p["profile"])
    record_every = p["record_every"] if p["record_every"] > 0 else None
    traj = coupler_mod.propagate_coupler(spec, np.array(p["b0"]), p["z_final"], record_every)
    rows = zip(
        traj.z, traj.pow_guide1, traj.pow_guide2, traj.pow_sym, traj.pow_antisym,
        traj.antisym_fraction,
    )
    _write_csv(
        out, "coupler",
        ["z", "pow1", "pow2", "pow_sym", "pow_antisym", "frac_antisym"],
        rows, config,
    )
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "dynamics": _cmd_dynamics,
    "pde": _cmd_pde,
    "ep-find": _cmd_ep_find,
    "coupler": _cmd_coupler,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-well",
        description="Floquet analysis of a quantum well shaken in the complex plane",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, schema in _SCHEMAS.items():
        sp = sub.add_parser(mode)
        for key, (conv, default) in schema.items():
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, type=conv, default=None,
                            help=f"default: {_fmt_value(default)}")
        sp.add_argument("--out", required=True, help="output CSV/JSON path")
        sp.add_argument("--config", default=None, help="INI file with a "
                        f"[{mode}] section; flags override it")
        sp.add_argument("--dump-config", default=None,
                        help="write the effective configuration to this path")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args.mode, args)
        if args.dump_config:
            with open(args.dump_config, "w") as fh:
                fh.write(config.to_ini())
        return _COMMANDS[args.mode](config, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloquetWellError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
