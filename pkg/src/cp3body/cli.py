"""Command-line front end: config-driven sweeps and oracle checks.

Run configurations are TOML files with sections [atoms.A|B|C], [sweep],
optional [quadrature] overrides, [output], and (for the oracle
subcommand) [oracle]; the exact grammar is documented in the README and
the shipped example configs.  Unknown keys anywhere are hard errors.

Exit status: 0 when every evaluated point converged, 2 when any point did
not converge (or an oracle deviation exceeds its threshold), 1 on
configuration errors.  Sweep points are evaluated by a worker pool but
rows are always written in sweep order, and all numeric fields use the
shortest round-trip decimal representation, so identical configs produce
byte-identical CSV bodies (apart from one timestamped comment line).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigParseError, CP3BodyError, RegionMismatch
from .geometry import AtomConfig, classify_region, triangle_from_positions
from .modesum import BoxSpec, box_free_correlation, box_reduced_integrand_check, continuum_free_correlation, shell_summary
from .polarizability import SingleResonance, Static
from .potentials import (
    delta_E3_spacelike_AB,
    delta_E3_symmetrized,
    delta_E_C,
    delta_E_C_pair,
    static_three_body,
)
from .quadrature import QuadratureSpec

THREADS_ENV_VAR = "CP3BODY_THREADS"

QUANTITIES = ("delta_E_C", "delta_E3", "delta_E3_spacelike_AB", "delta_E_C_pair", "static")

CSV_COLUMNS = (
    "ct", "alpha", "beta", "gamma", "region_label",
    "quantity", "value", "error_estimate", "converged", "warnings",
)

_QUANTITY_FUNCS = {
    "delta_E_C": lambda cfg, ct, spec: delta_E_C(cfg, ct, spec),
    "delta_E3": lambda cfg, ct, spec: delta_E3_symmetrized(cfg, ct, spec),
    "delta_E3_spacelike_AB": lambda cfg, ct, spec: delta_E3_spacelike_AB(cfg, ct, spec),
    "delta_E_C_pair": lambda cfg, ct, spec: delta_E_C_pair(cfg, ct, spec),
    "static": lambda cfg, ct, spec: static_three_body(cfg, spec),
}


@dataclass(frozen=True)
class RunConfig:
    atoms: AtomConfig
    sweep_kind: str
    sweep_values: tuple
    sweep_ct: float | None
    quantities: tuple
    quadrature: QuadratureSpec
    out_path: str
    out_format: str
    plot: bool
    oracle_box: BoxSpec
    oracle_k_bin_width: float
    oracle_threshold: float


def _require_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigParseError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _get(section, key, where, kind=None, required=True, default=None):
    if key not in section:
        if required:
            raise ConfigParseError(f"missing required key '{key}' in {where}")
        return default
    val = section[key]
    if kind is not None and (
        not isinstance(val, kind) or (isinstance(val, bool) and kind is not bool)
    ):
        raise ConfigParseError(f"key '{key}' in {where} has wrong type")
    return val


def _parse_model(section, where):
    _require_keys(section, {"position", "model", "alpha0", "k0", "gamma_damp"}, where)
    name = _get(section, "model", where, str)
    alpha0 = float(_get(section, "alpha0", where, (int, float)))
    try:
        if name == "static":
            for bad in ("k0", "gamma_damp"):
                if bad in section:
                    raise ConfigParseError(f"key '{bad}' not valid for static model in {where}")
            return Static(alpha0)
        if name == "single_resonance":
            k0 = float(_get(section, "k0", where, (int, float)))
            gamma = float(_get(section, "gamma_damp", where, (int, float), required=False, default=0.0))
            return SingleResonance(alpha0, k0, gamma)
    except ValueError as exc:
        raise ConfigParseError(f"invalid model parameters in {where}: {exc}") from exc
    raise ConfigParseError(f"unknown model '{name}' in {where} (use static | single_resonance)")


def _parse_position(section, where):
    pos = _get(section, "position", where, list)
    if len(pos) != 3 or not all(isinstance(x, (int, float)) for x in pos):
        raise ConfigParseError(f"'position' in {where} must be a list of three numbers")
    return [float(x) for x in pos]


def parse_config(path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigParseError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"malformed TOML in {path}: {exc}") from exc

    _require_keys(raw, {"atoms", "sweep", "quantity", "quadrature", "output", "oracle"}, "top level")

    atoms_sec = _get(raw, "atoms", "top level", dict)
    _require_keys(atoms_sec, {"A", "B", "C"}, "[atoms]")
    positions = {}
    models = {}
    for label in ("A", "B", "C"):
        sec = _get(atoms_sec, label, "[atoms]", dict)
        where = f"[atoms.{label}]"
        positions[label] = _parse_position(sec, where)
        models[label] = _parse_model(sec, where)
    try:
        atom_config = AtomConfig(
            positions["A"], positions["B"], positions["C"],
            models["A"], models["B"], models["C"],
        )
    except CP3BodyError as exc:
        raise ConfigParseError(f"invalid atom configuration: {exc}") from exc

    sweep = _get(raw, "sweep", "top level", dict)
    _require_keys(sweep, {"kind", "values", "ct"}, "[sweep]")
    kind = _get(sweep, "kind", "[sweep]", str)
    if kind not in ("time", "side_scaling", "custom_grid"):
        raise ConfigParseError("sweep kind must be time | side_scaling | custom_grid")
    values = _get(sweep, "values", "[sweep]", list)
    if not values or not all(isinstance(v, (int, float)) for v in values):
        raise ConfigParseError("sweep values must be a non-empty list of numbers")
    values = [float(v) for v in values]
    if any(v < 0 for v in values):
        raise ConfigParseError("sweep values must be non-negative")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigParseError("sweep values must be strictly increasing")
    sweep_ct = sweep.get("ct")
    if kind == "side_scaling":
        if sweep_ct is None:
            raise ConfigParseError("side_scaling sweep requires 'ct'")
        if any(v == 0 for v in values):
            raise ConfigParseError("side_scaling factors must be positive")
        sweep_ct = float(sweep_ct)
    elif sweep_ct is not None:
        raise ConfigParseError("'ct' is only valid for side_scaling sweeps")

    quantity = _get(raw, "quantity", "top level", str, required=False, default="all")
    if quantity == "all":
        quantities = QUANTITIES
    elif quantity in QUANTITIES:
        quantities = (quantity,)
    else:
        raise ConfigParseError(
            f"unknown quantity '{quantity}' (use one of {', '.join(QUANTITIES)} or all)"
        )

    quad_sec = raw.get("quadrature", {})
    allowed = {"rel_tol", "abs_tol", "max_subdivisions", "eta_schedule",
               "extrapolation_order", "osc_rel_tol"}
    _require_keys(quad_sec, allowed, "[quadrature]")
    kwargs = {}
    for key in allowed & set(quad_sec):
        val = quad_sec[key]
        if key == "eta_schedule":
            if not isinstance(val, list) or not all(isinstance(x, (int, float)) for x in val):
                raise ConfigParseError("eta_schedule must be a list of numbers")
            kwargs[key] = tuple(float(x) for x in val)
        elif key in ("max_subdivisions", "extrapolation_order"):
            if not isinstance(val, int):
                raise ConfigParseError(f"{key} must be an integer")
            kwargs[key] = val
        else:
            if not isinstance(val, (int, float)):
                raise ConfigParseError(f"{key} must be a number")
            kwargs[key] = float(val)
    try:
        quadrature = QuadratureSpec(**kwargs)
    except ValueError as exc:
        raise ConfigParseError(f"invalid [quadrature] section: {exc}") from exc

    out_sec = raw.get("output", {})
    _require_keys(out_sec, {"path", "format", "plot"}, "[output]")
    out_path = _get(out_sec, "path", "[output]", str, required=False, default="cp3body_out.csv")
    out_format = _get(out_sec, "format", "[output]", str, required=False, default="csv")
    if out_format not in ("csv", "json-lines"):
        raise ConfigParseError("output format must be csv | json-lines")
    plot = _get(out_sec, "plot", "[output]", bool, required=False, default=False)

    oracle_sec = raw.get("oracle", {})
    _require_keys(oracle_sec, {"box_L", "n_max", "eta_box", "k_bin_width", "threshold"}, "[oracle]")
    geom = triangle_from_positions(atom_config)
    box_L = float(oracle_sec.get("box_L", 40.0 * geom.max_side))
    n_max = oracle_sec.get("n_max", 60)
    if not isinstance(n_max, int):
        raise ConfigParseError("oracle n_max must be an integer")
    eta_box = float(oracle_sec.get("eta_box", 0.2))
    k_bin_width = float(oracle_sec.get("k_bin_width", 4.0 * 2.0 * math.pi / box_L))
    threshold = float(oracle_sec.get("threshold", 0.02))
    try:
        box = BoxSpec(L=box_L, n_max=n_max, soft_cutoff=eta_box)
    except ValueError as exc:
        raise ConfigParseError(f"invalid [oracle] section: {exc}") from exc

    return RunConfig(
        atoms=atom_config,
        sweep_kind=kind,
        sweep_values=tuple(values),
        sweep_ct=sweep_ct,
        quantities=quantities,
        quadrature=quadrature,
        out_path=out_path,
        out_format=out_format,
        plot=plot,
        oracle_box=box,
        oracle_k_bin_width=k_bin_width,
        oracle_threshold=threshold,
    )


def _fmt(x) -> str:
    """Shortest round-trip decimal representation."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _point_config(config: RunConfig, value: float):
    """Atom configuration and ct for one sweep point."""
    if config.sweep_kind == "side_scaling":
        base = config.atoms
        scaled = AtomConfig(
            base.position_a * value, base.position_b * value, base.position_c * value,
            base.model_a, base.model_b, base.model_c, base.eps_geom,
        )
        return scaled, config.sweep_ct
    return config.atoms, value


def _evaluate_point(config: RunConfig, value: float):
    """Rows for one sweep point, in fixed quantity order."""
    atoms, ct = _point_config(config, value)
    geom = triangle_from_positions(atoms)
    region = classify_region(geom, ct)
    rows = []
    for quantity in config.quantities:
        base = {
            "ct": ct,
            "alpha": geom.alpha,
            "beta": geom.beta,
            "gamma": geom.gamma,
            "quantity": quantity,
        }
        try:
            res = _QUANTITY_FUNCS[quantity](atoms, ct, config.quadrature)
        except RegionMismatch as exc:
            rows.append({
                **base,
                "region_label": region.label,
                "value": "",
                "error_estimate": "",
                "converged": "",
                "warnings": f"region_mismatch: {exc}",
            })
            continue
        rows.append({
            **base,
            "ct": res.t_input,
            "region_label": res.region.label,
            "value": res.value,
            "error_estimate": res.error_estimate,
            "converged": bool(res.converged),
            "warnings": "; ".join(res.warnings),
        })
    return rows


def _write_rows(config: RunConfig, rows, stream):
    if config.out_format == "csv":
        stream.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    else:
        for row in rows:
            stream.write(json.dumps({c: row[c] for c in CSV_COLUMNS}) + "\n")


def _plot_rows(config: RunConfig, rows, geom):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for quantity in config.quantities:
        pts = [(r["ct"], r["value"]) for r in rows
               if r["quantity"] == quantity and r["value"] != "" and math.isfinite(r["ct"])]
        if pts:
            xs, ys = zip(*sorted(pts))
            ax.plot(xs, ys, marker="o", markersize=3, label=quantity)
    thresholds = {
        "alpha": geom.alpha, "beta": geom.beta, "gamma": geom.gamma,
        "alpha-gamma": geom.alpha - geom.gamma, "beta-gamma": geom.beta - geom.gamma,
    }
    for name, ct0 in thresholds.items():
        if ct0 > 0:
            ax.axvline(ct0, color="gray", linestyle=":", linewidth=0.8)
            ax.annotate(name, (ct0, 0.98), xycoords=("data", "axes fraction"),
                        fontsize=7, rotation=90, va="top")
    ax.set_xlabel("ct [L0]")
    ax.set_ylabel("energy [hbar c / L0]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    base, _ = os.path.splitext(config.out_path)
    plot_path = base + ".svg"
    fig.savefig(plot_path)
    plt.close(fig)
    return plot_path


def cmd_run(config: RunConfig, threads: int, quiet: bool) -> int:
    with ThreadPoolExecutor(max_workers=threads) as pool:
        per_point = list(pool.map(lambda v: _evaluate_point(config, v), config.sweep_values))
    rows = [row for point in per_point for row in point]
    buf = io.StringIO()
    _write_rows(config, rows, buf)
    with open(config.out_path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    if config.plot:
        geom = triangle_from_positions(config.atoms)
        plot_path = _plot_rows(config, rows, geom)
        if not quiet:
            print(f"plot written to {plot_path}")
    if not quiet:
        print(f"{len(rows)} rows written to {config.out_path}")
    unconverged = [r for r in rows if r["converged"] is False]
    return 2 if unconverged else 0


def cmd_oracle(config: RunConfig, threads: int, quiet: bool) -> int:
    geom = triangle_from_positions(config.atoms)
    box = config.oracle_box
    rows = box_reduced_integrand_check(box, geom, config.oracle_k_bin_width)
    max_dev, mean_dev = shell_summary(rows)

    # matched-cutoff free-correlation comparison over the A-B separation
    r_ab = geom.gamma * geom.n_ab
    k_cut = box.k_axis_max
    disc = box_free_correlation(box, r_ab, np.zeros(3), k_cut=k_cut)
    cont = continuum_free_correlation(box.soft_cutoff, r_ab, k_max=k_cut)
    corr_dev = float(np.linalg.norm(disc - cont) / np.linalg.norm(cont))

    buf = io.StringIO()
    buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["term", "k_center", "n_modes", "discrete", "analytic", "deviation"])
    for row in rows:
        writer.writerow([row.term, _fmt(row.k_center), row.n_modes,
                         _fmt(row.discrete), _fmt(row.analytic), _fmt(row.deviation)])
    writer.writerow(["free_correlation", _fmt(k_cut), box.mode_count, "", "", _fmt(corr_dev)])
    with open(config.out_path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    if not quiet:
        print(f"max shell deviation {max_dev:.3%}, mean {mean_dev:.3%}, "
              f"free-correlation deviation {corr_dev:.3%}; table in {config.out_path}")
    return 0 if max_dev < config.oracle_threshold else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cp3body",
        description="Time-dependent three-body Casimir-Polder energies: sweeps and oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "evaluate configured quantities over the sweep"),
        ("oracle", "run the finite-box mode-sum checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="TOML run configuration")
        p.add_argument("--out", help="override output.path")
        p.add_argument("--format", choices=["csv", "json-lines"], help="override output.format")
        p.add_argument("--plot", action="store_true", help="force plot output")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default ${THREADS_ENV_VAR} or 1)")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        try:
            threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
        except ValueError:
            print(f"error: ${THREADS_ENV_VAR} must be an integer", file=sys.stderr)
            return 1
    if threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 1

    try:
        config = parse_config(args.config)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        config = _replace_output(config, path=args.out)
    if args.format:
        config = _replace_output(config, fmt=args.format)
    if args.plot:
        config = _replace_output(config, plot=True)

    try:
        if args.command == "run":
            return cmd_run(config, threads, args.quiet)
        return cmd_oracle(config, threads, args.quiet)
    except CP3BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _replace_output(config: RunConfig, path=None, fmt=None, plot=None) -> RunConfig:
    from dataclasses import replace
    kwargs = {}
    if path is not None:
        kwargs["out_path"] = path
    if fmt is not None:
        kwargs["out_format"] = fmt
    if plot is not None:
        kwargs["plot"] = plot
    return replace(config, **kwargs)


if __name__ == "__main__":
    sys.exit(main())
