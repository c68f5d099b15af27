"""Command-line front end: ``pmech <subcommand> [flags]``.

Settings come from built-in defaults, then an optional INI file
(``--config``, one section per subcommand plus ``[output]``), then flags.
Exit status: 0 success, 1 a requested check failed, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

SCHEMA_VERSION = 1

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _hbar(text: str):
    t = str(text).strip().lower()
    if t == "formal":
        return "formal"
    try:
        return float(t)
    except ValueError as exc:
        raise ConfigError(f"hbar must be a number or 'formal', got {text!r}") from exc


def _lattice(text: str) -> tuple[int, int]:
    try:
        a, b = str(text).lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise ConfigError(f"lattice must look like N0xN1, got {text!r}") from exc


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _optional_int(text):
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    return int(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ConfigError(f"expected one of {options}, got {text!r}")
        return text

    return parse


# section -> key -> (parser, default, help)
SCHEMA: dict[str, dict[str, tuple[Callable, Any, str]]] = {
    "output": {
        "out_dir": (str, "pmech-out", "directory for CSV/JSON artifacts"),
        "report": (str, "", "JSON report path (default: <out_dir>/<command>-report.json)"),
    },
    "brackets": {
        "f": (str, "q^3", "first observable"),
        "g": (str, "p^3", "second observable"),
        "n": (int, 1, "degrees of freedom"),
        "hbar": (_hbar, 0.0, "central parameter, or 'formal'"),
        "kind": (_choice("ub", "poisson", "star"), "ub", "bracket to compute"),
    },
    "oscillator": {
        "hamiltonian": (str, "(p^2 + q^2)/2", "Hamiltonian polynomial in q, p"),
        "q0": (float, 1.0, "initial position"),
        "p0": (float, 0.0, "initial momentum"),
        "hbar": (_float_list, [0.0], "central parameters for the observable flow"),
        "t_end": (float, 2 * math.pi, "final time"),
        "dt": (float, 1e-3, "time step"),
        "observable": (str, "q", "observable evolved in coefficient space"),
        "truncation": (_optional_int, None, "basis degree when deg H > 2"),
        "method": (_choice("rk4", "leapfrog"), "rk4", "classical integrator"),
        "record_every": (int, 10, "record every k-th step"),
    },
    "kleingordon": {
        "mass": (float, 1.0, "field mass"),
        "lattice": (_lattice, (2000, 256), "time steps x spatial sites"),
        "du": (float, 0.05, "spatial step (adjusted so k is a lattice mode)"),
        "dt": (float, 0.0, "time step (0: half the spatial step)"),
        "k": (float, 2.0, "plane-wave wavenumber"),
        "pulse": (_bool, False, "evolve a right-moving Gaussian pulse instead"),
        "pulse_width": (float, 0.5, "pulse width"),
        "record_every": (int, 1, "record every k-th step"),
    },
    "fock": {
        "hbar": (float, 1.0, "central parameter (> 0)"),
        "grid": (str, "-6,6,256", "axis spec lo,hi,N used for q and p"),
        "state": (_choice("vacuum", "coherent", "position"), "vacuum", "test function"),
        "shift": (_float_list, [0.5, -0.3], "group element (x, y) for the coherent state"),
    },
    "verify": {
        "suite": (_choice("all", "groups", "brackets", "representations", "dynamics", "clifford", "fields"), "all", "check group"),
    },
}

COMMANDS = ("brackets", "oscillator", "kleingordon", "fock", "verify")


@dataclass
class RunConfig:
    command: str
    settings: dict
    output: dict

    def resolved(self) -> dict:
        return {"command": self.command, self.command: _plain(self.settings), "output": _plain(self.output)}


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def read_config_file(path: str | os.PathLike) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
        out[section] = dict(cp[section])
    return out


def resolve(command: str, file_values: dict, flags: dict) -> RunConfig:
    resolved = {}
    for section in (command, "output"):
        vals = {}
        for key, (parser, default, _) in SCHEMA[section].items():
            raw = flags.get(key) if flags.get(key) is not None else file_values.get(section, {}).get(key)
            if raw is None:
                vals[key] = default
                continue
            try:
                vals[key] = parser(raw)
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
        resolved[section] = vals
    return RunConfig(command, resolved[command], resolved["output"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmech", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="INI file with [output] and per-command sections")
    for key, (_, default, help_) in SCHEMA["output"].items():
        ap.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=f"{help_} [{default}]")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        for key, (_, default, help_) in SCHEMA[cmd].items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=f"{help_} [{default}]")
    return ap


# -- artifacts --------------------------------------------------------------


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (Fraction, complex)):
        return str(o)
    raise TypeError(f"not serializable: {type(o)}")


def write_report(cfg: RunConfig, results: dict, status: str) -> Path:
    out_dir = Path(cfg.output["out_dir"])
    path = Path(cfg.output["report"]) if cfg.output["report"] else out_dir / f"{cfg.command}-report.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, "status": status, "config": cfg.resolved(), "results": results}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


# -- commands ---------------------------------------------------------------


def run_brackets(cfg: RunConfig) -> dict:
    from . import brackets as br
    from .poly import parse_observable

    s = cfg.settings
    formal = s["hbar"] == "formal"
    f = parse_observable(s["f"], s["n"], formal=False)
    g = parse_observable(s["g"], s["n"], formal=False)
    if s["kind"] == "poisson" or (s["hbar"] == 0 and s["kind"] == "ub"):
        result = br.poisson_bracket(f, g)
    else:
        lam = br.FORMAL if formal else br.lam_from_hbar(s["hbar"])
        if s["kind"] == "star" and not formal:
            lam = 1j * lam
        fn = br.star_product if s["kind"] == "star" else br.ub_bracket_poly
        result = fn(f, g, lam)
    print(result)
    return {"result": str(result), "lam_per_hbar": br.HBAR_TO_LAMBDA}


def run_oscillator(cfg: RunConfig) -> dict:
    from . import dynamics as dy
    from .poly import parse_observable

    s = cfg.settings
    H = dy.HamiltonianSpec.parse(s["hamiltonian"])
    out_dir = Path(cfg.output["out_dir"])
    rec = dy.evolve_classical(H, s["q0"], s["p0"], s["t_end"], s["dt"], s["method"], s["record_every"])
    energy = rec.metadata["energy"]
    write_csv(
        out_dir / "oscillator-trajectory.csv",
        ["t", "q", "p", "H"],
        ([t, z[0], z[1], e] for t, z, e in zip(rec.times, rec.states, energy)),
    )
    obs = parse_observable(s["observable"], 1, False)
    flows = {}
    for hbar in s["hbar"]:
        m = dy.evolve_observable_moyal(H, obs, hbar, s["t_end"], s["dt"], s["truncation"], s["record_every"])
        basis = m.metadata["basis"]
        names = [_mono_name(e) for e in basis]
        write_csv(
            out_dir / f"oscillator-observable-hbar{hbar:g}.csv",
            ["t"] + names,
            ([t, *row] for t, row in zip(m.times, m.metadata["coefficients"])),
        )
        flows[f"{hbar:g}"] = {"final": str(m.final), "value_at_initial_point": float(m.final(s["q0"], s["p0"]))}
    qf, pf = rec.final
    print(f"t={rec.times[-1]:.6g} q={qf:.12g} p={pf:.12g} energy_drift={rec.metadata['energy_drift']:.3g}")
    for hb, info in flows.items():
        print(f"hbar={hb}: {s['observable']}(t) = {info['final']}")
    return {
        "final_state": [float(qf), float(pf)],
        "energy_drift": rec.metadata["energy_drift"],
        "observable_flows": flows,
    }


def _mono_name(e) -> str:
    parts = [f"{g}^{k}" if k > 1 else g for g, k in zip(("q", "p"), e) if k]
    return "*".join(parts) or "1"


def run_kleingordon(cfg: RunConfig) -> dict:
    from . import dw_field as dw
    from .clifford import Metric

    s = cfg.settings
    n_steps, n_sites = s["lattice"]
    metric = Metric.from_signature(1, 1)
    H = dw.free_scalar_hamiltonian(metric, s["mass"])
    a0, a1, m2 = dw.kg_coefficients(H)
    du = s["du"]
    out_dir = Path(cfg.output["out_dir"])
    results: dict = {}
    if s["pulse"]:
        u = du * np.arange(n_sites)
        centre, w = u[-1] / 2, s["pulse_width"]
        q0 = np.exp(-((u - centre) ** 2) / w**2)
        p0 = 2 * (u - centre) / w**2 * q0 / a0  # right-moving when m = 0
        k = None
    else:
        length = n_sites * du
        j = max(1, round(s["k"] * length / (2 * math.pi)))
        du = 2 * math.pi * j / (s["k"] * n_sites)
        k = s["k"]
        _, q0, p0 = dw.plane_wave_data(k, H, n_sites, du)
    dt = s["dt"] if s["dt"] > 0 else 0.5 * du
    st = dw.integrate_dw(H, q0, p0, dt, n_steps, du=du, record_every=s["record_every"])
    times = st.metadata["times"]
    write_csv(
        out_dir / "kleingordon-energy.csv",
        ["t", "energy_shadow", "energy_naive"],
        zip(times, st.metadata["energy_shadow"], st.metadata["energy_naive"]),
    )
    stride = max(1, len(times) // 50)
    u = du * np.arange(n_sites)
    write_csv(
        out_dir / "kleingordon-field.csv",
        ["t", "u", "q", "p0", "p1"],
        (
            [times[i], u[x], st.q[i, x], st.p[0, i, x], st.p[1, i, x]]
            for i in range(0, len(times), stride)
            for x in range(n_sites)
        ),
    )
    results["du"] = du
    results["dt"] = dt
    results["energy_drift_shadow"] = dw.energy_drift(st)
    results["energy_drift_naive"] = dw.energy_drift(st, "naive")
    results["constraint_residual"] = st.metadata["constraint_residual"]
    if k is not None:
        measured = dw.measure_dispersion(st, k)
        exact = float(dw.kg_dispersion(k, a0, a1, m2))
        lattice = float(dw.lattice_dispersion(k, a0, a1, m2, st.steps[0], du))
        row = [k, k * du, measured, exact, lattice, abs(measured - exact) / exact]
        write_csv(
            out_dir / "kleingordon-dispersion.csv",
            ["k", "k_du", "omega_measured", "omega_continuum", "omega_lattice", "rel_error"],
            [row],
        )
        results["dispersion"] = dict(zip(["k", "k_du", "omega_measured", "omega_continuum", "omega_lattice", "rel_error"], row))
        print(f"k={k:g} k*du={k * du:.3g} omega={measured:.8g} continuum={exact:.8g} rel_error={row[-1]:.3g}")
        exact_state = dw.plane_wave_state(H, k, (min(len(times), 128), n_sites), (st.steps[0], du))
        results["reduction_exact"] = dw.verify_field_reduction(H, exact_state).to_dict()
    results["reduction_lattice"] = dw.verify_field_reduction(H, st, order=2).to_dict()
    print(f"energy drift (shadow)={results['energy_drift_shadow']:.3g} constraint residual={results['constraint_residual']:.3g}")
    return results


def run_fock(cfg: RunConfig) -> dict:
    from . import representations as rep
    from .grid import Axis
    from .groups import HeisenbergElement

    s = cfg.settings
    hbar = s["hbar"]
    ax = Axis.parse(s["grid"])
    axes = (ax, ax)
    if s["state"] == "vacuum":
        f = rep.vacuum(axes, hbar)
    elif s["state"] == "coherent":
        if len(s["shift"]) != 2:
            raise ConfigError("shift must be 'x,y'")
        f = rep.coherent_state(hbar, HeisenbergElement(0.0, s["shift"][0], s["shift"][1]), axes)
    else:
        f = rep.vacuum(axes, hbar).with_samples(ax.points[:, None] * rep.vacuum(axes, hbar).samples)
    rows = []
    for scheme in rep.SCHEMES:
        r = rep.fock_residual(hbar, f, scheme)
        rows.append([scheme, r, r / f.norm()])
        print(f"{scheme:9s} residual={r:.3e} relative={r / f.norm():.3e}")
    write_csv(Path(cfg.output["out_dir"]) / "fock-residuals.csv", ["scheme", "residual", "relative"], rows)
    return {"residuals": {r[0]: {"absolute": r[1], "relative": r[2]} for r in rows}}


def run_verify(cfg: RunConfig) -> dict:
    from .checks import run_suite

    results = run_suite(cfg.settings["suite"])
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    payload = {"checks": [_drop_runtime(r.to_dict()) for r in results], "failed": failed}
    if failed:
        raise CheckFailed(payload)
    return payload


def _drop_runtime(d: dict) -> dict:
    d = dict(d)
    d.pop("runtime", None)
    return d


RUNNERS = {
    "brackets": run_brackets,
    "oscillator": run_oscillator,
    "kleingordon": run_kleingordon,
    "fock": run_fock,
    "verify": run_verify,
}


def run(cfg: RunConfig) -> int:
    from .dw_field import CFLViolationError
    from .dynamics import BlowUpError, TruncationRequiredError
    from .poly import PolyParseError
    from .representations import TruncationError

    try:
        results = RUNNERS[cfg.command](cfg)
    except CheckFailed as exc:
        write_report(cfg, exc.args[0], "check_failed")
        return EXIT_CHECK
    except (ConfigError, PolyParseError, TruncationRequiredError) as exc:
        print(f"pmech: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, CFLViolationError, TruncationError, FloatingPointError) as exc:
        print(f"pmech: numerical failure: {exc}", file=sys.stderr)
        write_report(cfg, {"error": str(exc)}, "numerical_failure")
        return EXIT_NUMERIC
    path = write_report(cfg, results, "ok")
    print(f"report: {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve(args.command, file_values, flags)
    except ConfigError as exc:
        print(f"pmech: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
