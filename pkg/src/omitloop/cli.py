"""Command-line front end producing deterministic CSV/JSON artifacts.

Each subcommand wraps one analysis job.  Every output file is accompanied
by a ``<out>.manifest.json`` run manifest holding the fully resolved
parameter set (canonical config keys), the grid definition and the library
version; feeding a manifest back through ``--config`` reproduces the run.

Exit codes: 0 success, 1 physics failure (instability, no steady state,
singular response ...), 2 usage/configuration errors.

Floats are written with 17 significant digits and '\\n' line endings, so
reruns with identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import analysis, linear_response, stability
from .errors import ConfigError, PhysicsError
from .oracle import integrate_linearized
from .params import from_config, to_config
from .steady_state import solve_steady_state

try:
    _VERSION = version("omitloop")
except PackageNotFoundError:  # running from a source tree
    _VERSION = "unknown"


def _fmt(x) -> str:
    if x is None:
        return "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row) + "\n")


def _write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_path, job, params, grid):
    manifest = {
        "job": job,
        "library": "omitloop",
        "version": _VERSION,
        "config": to_config(params),
        "grid": grid,
        "output": str(out_path),
    }
    _write_json(str(out_path) + ".manifest.json", manifest)


def load_config_document(path):
    """Read a flat config JSON file; run manifests are accepted too."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    if isinstance(doc.get("config"), dict):
        doc = doc["config"]  # fed back a manifest
    return doc


def _parse_set_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"--set value {text!r} is not a number")


def resolve_params(args):
    doc = load_config_document(args.config) if args.config else {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        doc[key.strip()] = _parse_set_value(value.strip())
    return from_config(doc)


def _omega_grid(args, params):
    return np.linspace(args.omega_min, args.omega_max,
                       args.omega_points) * params.omega_m


def _phi2_grid(args, default_max=2.0 * math.pi):
    lo = getattr(args, "phi2_min", 0.0)
    hi = getattr(args, "phi2_max", None)
    if hi is None:
        hi = default_max
    return np.linspace(lo, hi, args.phi2_points)


# ----------------------------------------------------------------- jobs


def _job_spectrum(args):
    params = resolve_params(args)
    grid = _omega_grid(args, params)
    spec = linear_response.spectrum(params, grid)
    report = stability.classify_params(params)
    if not report.stable:
        raise PhysicsError(
            f"operating point unstable: max Re(eigenvalue) = "
            f"{report.margin:.6e} rad/s"
        )
    rows = []
    tau = spec.tau_g if spec.tau_g is not None else np.full(len(spec), np.nan)
    for i in range(len(spec)):
        t_p = spec.t_p[i]
        rows.append((
            spec.omegas[i] / params.omega_m,
            t_p.real,
            t_p.imag,
            abs(t_p),
            abs(t_p) ** 2,
            spec.psi[i],
            tau[i],
            spec.omegas[i],
        ))
    _write_csv(args.out,
               ["omega_over_omega_m", "re_tp", "im_tp", "abs_tp",
                "abs_tp_sq", "psi_rad", "tau_g_s", "omega_rad_s"],
               rows)
    _write_manifest(args.out, "spectrum", params, {
        "omega_min_over_omega_m": args.omega_min,
        "omega_max_over_omega_m": args.omega_max,
        "omega_points": args.omega_points,
    })
    return 0


def _job_stability_map(args):
    params = resolve_params(args)
    g2_grid = np.linspace(args.g2mag_min, args.g2mag_max,
                          args.g2mag_points) * params.g1_mag
    phi2_grid = _phi2_grid(args)
    mu = args.mu * params.gamma_span
    status, margins, failures = stability.stability_map(
        params, g2_grid, phi2_grid, mu, threads=args.threads
    )
    rows = []
    for i, g2 in enumerate(g2_grid):
        for j, phi2 in enumerate(phi2_grid):
            rows.append((
                g2 / params.g1_mag, phi2, str(int(status[i, j])),
                margins[i, j], g2,
            ))
    _write_csv(args.out,
               ["g2_mag_over_g1", "phi2_rad", "status", "margin_rad_s",
                "g2_mag_rad_s"],
               rows)
    _write_manifest(args.out, "stability-map", params, {
        "g2mag_min_over_g1": args.g2mag_min,
        "g2mag_max_over_g1": args.g2mag_max,
        "g2mag_points": args.g2mag_points,
        "phi2_points": args.phi2_points,
        "mu_over_gamma_span": args.mu,
        "failures": [f"({i},{j}) {msg}" for i, j, msg in failures],
    })
    return 0


def _job_root_loci(args):
    params = resolve_params(args)
    phi2_grid = _phi2_grid(args, default_max=math.pi)
    locus = stability.mechanical_root_loci(params, phi2_grid)
    rows = []
    for k, phi2 in enumerate(locus.phi2_grid):
        t0, t1 = locus.tracks[0, k], locus.tracks[1, k]
        rows.append((
            phi2,
            t0.real / params.omega_m, t0.imag / params.omega_m,
            t1.real / params.omega_m, t1.imag / params.omega_m,
            t0.real, t0.imag, t1.real, t1.imag,
        ))
    _write_csv(args.out,
               ["phi2_rad",
                "re_track0_over_omega_m", "im_track0_over_omega_m",
                "re_track1_over_omega_m", "im_track1_over_omega_m",
                "re_track0_rad_s", "im_track0_rad_s",
                "re_track1_rad_s", "im_track1_rad_s"],
               rows)
    _write_manifest(args.out, "root-loci", params,
                    {"phi2_points": args.phi2_points})
    return 0


def _job_map2d(args):
    params = resolve_params(args)
    omega_grid = _omega_grid(args, params)
    mu_grid = np.linspace(args.mu_min, args.mu_max,
                          args.mu_points) * params.gamma_span
    result = analysis.map2d(params, omega_grid, mu_grid, args.phi2,
                            threads=args.threads)
    rows = []
    for i, mu in enumerate(mu_grid):
        for j, w in enumerate(omega_grid):
            v = result.values[i, j]
            rows.append((
                w / params.omega_m, mu / params.gamma_span, v, v * v, w, mu,
            ))
    _write_csv(args.out,
               ["omega_over_omega_m", "mu_over_gamma_span", "abs_tp",
                "abs_tp_sq", "omega_rad_s", "mu_rad_s"],
               rows)
    _write_manifest(args.out, "map2d", params, {
        "omega_min_over_omega_m": args.omega_min,
        "omega_max_over_omega_m": args.omega_max,
        "omega_points": args.omega_points,
        "mu_min_over_gamma_span": args.mu_min,
        "mu_max_over_gamma_span": args.mu_max,
        "mu_points": args.mu_points,
        "phi2_rad": args.phi2,
        "failures": [f"row {i}: {msg}" for i, msg in result.errors],
    })
    return 0


def _bands_of(table):
    seen = []
    for row in table.rows:
        for m in row:
            if m.band not in seen:
                seen.append(m.band)
    return seen


def _job_band_sweep(args, kind):
    params = resolve_params(args)
    phi2_grid = _phi2_grid(args)
    omega_grid = _omega_grid(args, params)
    sweep = (analysis.gain_bandwidth_sweep if kind == "gain-bw"
             else analysis.delay_bandwidth_sweep)
    table = sweep(params, phi2_grid, bands=args.bands, omega_grid=omega_grid)
    bands = _bands_of(table)
    header = ["phi2_rad"]
    for b in bands:
        header += [
            f"{b}_peak_omega_over_omega_m", f"{b}_peak_omega_rad_s",
            f"{b}_peak_value", f"{b}_hwhm_over_gamma_span",
            f"{b}_hwhm_rad_s", f"{b}_product", f"{b}_truncated",
            f"{b}_advance", f"{b}_found",
        ]
    header.append("total_product")
    rows = []
    span = params.gamma_span
    for k, phi2 in enumerate(table.axis_values):
        row = [phi2]
        for m in table.rows[k]:
            row += [
                m.peak_omega / params.omega_m, m.peak_omega, m.peak_value,
                m.hwhm / span if span else math.nan, m.hwhm, m.product,
                str(int(m.truncated)), str(int(m.advance)),
                str(int(m.found)),
            ]
        row.append(table.totals[k])
        rows.append(tuple(row))
    _write_csv(args.out, header, rows)
    _write_manifest(args.out, kind, params, {
        "phi2_points": args.phi2_points,
        "bands": args.bands,
        "omega_min_over_omega_m": args.omega_min,
        "omega_max_over_omega_m": args.omega_max,
        "omega_points": args.omega_points,
    })
    return 0


def _job_ep(args):
    params = resolve_params(args)
    span = params.gamma_span
    lo, hi = args.bracket
    result = stability.locate_ep(params, (lo * span, hi * span))
    payload = {
        "mu_ep_rad_s": result.mu_ep,
        "mu_ep_over_gamma_span": result.mu_ep / span,
        "gap_at_ep_rad_s": result.gap_at_ep,
        "gap_at_ep_over_gamma_span": result.gap_at_ep / span,
        "bracket_rad_s": list(result.bracket),
        "bracket_over_gamma_span": [lo, hi],
    }
    _write_json(args.out, payload)
    _write_manifest(args.out, "ep", params,
                    {"bracket_over_gamma_span": [lo, hi]})
    return 0


def _job_oracle_check(args):
    params = resolve_params(args)
    rng = np.random.default_rng(args.seed)
    span = params.gamma_span
    points = []
    worst = 0.0
    found = 0
    attempts = 0
    while found < args.points:
        attempts += 1
        if attempts > 50 * args.points:
            raise PhysicsError(
                "could not find enough stable sample points near defaults"
            )
        phi2 = rng.uniform(0.0, 2.0 * math.pi)
        mu_frac = rng.uniform(0.15, 0.6)
        p = params.replace(g2_phase=phi2, mu_mag=mu_frac * span)
        report = stability.classify_params(p)
        if not report.stable:
            continue
        found += 1
        state, _ = solve_steady_state(p)
        offsets = rng.uniform(0.98, 1.02, size=args.offsets) * p.omega_m
        errors = []
        for w in offsets:
            closed = linear_response.transmission(p, state, w).a1_minus
            measured = integrate_linearized(p, state, w).a1_minus
            errors.append(abs(closed - measured) / abs(closed))
        worst = max(worst, max(errors))
        points.append({
            "phi2_rad": phi2,
            "mu_over_gamma_span": mu_frac,
            "offsets_over_omega_m": [w / p.omega_m for w in offsets],
            "rel_errors": errors,
        })
    _write_json(args.out, {"max_rel_error": worst, "points": points})
    _write_manifest(args.out, "oracle-check", params, {
        "points": args.points, "offsets": args.offsets, "seed": args.seed,
    })
    return 0


# ------------------------------------------------------------ interface


def _add_common(sub):
    sub.add_argument("--config", help="flat JSON config (or a run manifest)")
    sub.add_argument("--out", required=True, help="output file path")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads for grid jobs")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one config key (repeatable)")


def _add_omega_flags(sub, points=2001):
    sub.add_argument("--omega-min", type=float, default=0.98,
                     help="probe offset window start, in omega_m units")
    sub.add_argument("--omega-max", type=float, default=1.02,
                     help="probe offset window end, in omega_m units")
    sub.add_argument("--omega-points", type=int, default=points)


def _add_phi2_flags(sub, points, default_max=None):
    sub.add_argument("--phi2-points", type=int, default=points)
    sub.add_argument("--phi2-min", type=float, default=0.0)
    sub.add_argument("--phi2-max", type=float, default=default_max,
                     help="defaults to 2*pi (pi for root loci)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omitloop",
        description="Loop-coupled optomechanics: probe response, stability "
                    "and exceptional-point analysis jobs.",
    )
    parser.add_argument("--version", action="version",
                        version=f"omitloop {_VERSION}")
    subs = parser.add_subparsers(dest="job", required=True)

    s = subs.add_parser("spectrum", help="probe transmission spectrum")
    _add_common(s)
    _add_omega_flags(s)
    s.set_defaults(func=_job_spectrum)

    s = subs.add_parser("stability-map",
                        help="stable/unstable chart over |g2| and phi2")
    _add_common(s)
    s.add_argument("--g2mag-min", type=float, default=0.05,
                   help="|g2| range start, in g1 units")
    s.add_argument("--g2mag-max", type=float, default=4.0)
    s.add_argument("--g2mag-points", type=int, default=80)
    _add_phi2_flags(s, points=81)
    s.add_argument("--mu", type=float, default=0.5,
                   help="|mu| in (gamma1 - gamma2) units")
    s.set_defaults(func=_job_stability_map)

    s = subs.add_parser("root-loci",
                        help="upper mechanical eigenvalue tracks over phi2")
    _add_common(s)
    _add_phi2_flags(s, points=181, default_max=None)
    s.set_defaults(func=_job_root_loci)

    s = subs.add_parser("map2d",
                        help="|t_p| map over probe offset and |mu|")
    _add_common(s)
    _add_omega_flags(s, points=801)
    s.add_argument("--mu-min", type=float, default=0.02,
                   help="|mu| range start, in (gamma1 - gamma2) units")
    s.add_argument("--mu-max", type=float, default=0.7)
    s.add_argument("--mu-points", type=int, default=69)
    s.add_argument("--phi2", type=float, default=math.pi / 2,
                   help="coupling phase phi2 in rad")
    s.set_defaults(func=_job_map2d)

    s = subs.add_parser("gain-bw",
                        help="transmission peak/bandwidth sweep over phi2")
    _add_common(s)
    _add_omega_flags(s)
    _add_phi2_flags(s, points=32)
    s.add_argument("--bands", choices=("split", "single"), default="split")
    s.set_defaults(func=_job_band_sweep, kind="gain-bw")

    s = subs.add_parser("delay-bw",
                        help="group-delay peak/bandwidth sweep over phi2")
    _add_common(s)
    _add_omega_flags(s)
    _add_phi2_flags(s, points=32)
    s.add_argument("--bands", choices=("split", "single"), default="split")
    s.set_defaults(func=_job_band_sweep, kind="delay-bw")

    s = subs.add_parser("ep", help="locate the exceptional point on |mu|")
    _add_common(s)
    s.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"),
                   default=(0.15, 0.35),
                   help="|mu| bracket in (gamma1 - gamma2) units")
    s.set_defaults(func=_job_ep)

    s = subs.add_parser("oracle-check",
                        help="closed form vs time domain at random points")
    _add_common(s)
    s.add_argument("--points", type=int, default=10)
    s.add_argument("--offsets", type=int, default=5)
    s.add_argument("--seed", type=int, default=7)
    s.set_defaults(func=_job_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "kind", None) is not None:
            return args.func(args, args.kind)
        return args.func(args)
    except ConfigError as exc:
        print(f"omitloop: config error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"omitloop: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"omitloop: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
