"""Command line front end.

Subcommands: catalog, orbit, section, sweep, validate, jacobi.  Every run that
writes files also writes a manifest.json listing them (written last, even
after aborts).  Exit codes: 0 success, 2 validation failure, 3 numerical
abort or singular initial state, 4 usage error.
"""

import argparse
import configparser
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .charts import PhaseState, SingularityError, jacobi_forward, jacobi_inverse
from .diagnostics import (classify_section, find_region, integral_drift,
                          sample_initial_conditions)
from .dynamics import default_state, fiber_momenta, natural_system
from .figures import render_section_figure
from .groups import (check_invariance, group_checks, icosahedral_group,
                     octahedral_group, symmetry_group, tetrahedral_group)
from .integrators import IntegratorConfig, integrate, write_orbit_csv
from .potentials import (CATALOG_NAMES, CATALOG_VERSION, POLYNOMIALS, catalog,
                         factorization_check, gradient_check, make)
from .sections import SectionSpec, compute_section_both, write_section_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 4

_DEFAULT_TRIGGER = {
    "sphere": "psi",
    "plane-polar": "psi",
    "plane-cartesian": "y",
    "euclid3-spherical": "theta",
    "euclid3-cartesian": "z",
    "euclid4-cylindrical": "theta",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


class UsageError(Exception):
    pass


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--params entries look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        params[key.strip()] = value
    return params


def _parse_tol(text):
    parts = [p for p in str(text).split(",") if p]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--tol takes one or two numbers, got {text!r}")
    if len(values) == 1:
        return values[0], values[0]
    if len(values) == 2:
        return values[0], values[1]
    raise UsageError(f"--tol takes one or two numbers, got {text!r}")


def _parse_floats(text, n=None, flag=""):
    try:
        values = tuple(float(p) for p in str(text).split(","))
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}")
    if n is not None and len(values) != n:
        raise UsageError(f"{flag} expects {n} numbers, got {len(values)}")
    return values


_IC_COORDS = ("theta", "psi", "rho", "u", "r", "x", "y", "z")


def _add_run_flags(p, section=False, sweep=False):
    p.add_argument("--potential", required=False, help="catalog entry name")
    p.add_argument("--params", nargs="*", metavar="K=V",
                   help="potential parameter overrides")
    p.add_argument("--negate", action="store_true",
                   help="run in -V instead of V")
    p.add_argument("--tmax", type=float, default=None,
                   help="integration horizon (default 50)")
    p.add_argument("--step", type=float, default=None,
                   help="fixed step size (default 0.002)")
    p.add_argument("--adaptive", action="store_true",
                   help="use the embedded adaptive integrator")
    p.add_argument("--tol", default=None,
                   help="adaptive tolerance: rtol[,atol] (default 1e-10)")
    p.add_argument("--energy", type=float, default=None,
                   help="total energy used to build momenta")
    p.add_argument("--out-dir", default=None, help="output directory")
    p.add_argument("--config", default=None,
                   help="INI config file; flags override it")
    if not sweep:
        for c in _IC_COORDS:
            p.add_argument(f"--{c}0", type=float, default=None,
                           help=argparse.SUPPRESS)
            p.add_argument(f"--p-{c}0", type=float, default=None,
                           help=argparse.SUPPRESS)
        p.add_argument("--ic-file", default=None,
                       help="JSON file with one initial condition")
    if section or sweep:
        p.add_argument("--section-trigger", default=None,
                       help="coordinate whose crossings are recorded")
        p.add_argument("--section-value", type=float, default=None,
                       help="crossing value (default: the start's coordinate)")
        p.add_argument("--direction", default=None,
                       choices=("positive", "negative", "both"),
                       help="crossing direction filter (default positive)")
        p.add_argument("--record", default=None,
                       help="two comma-separated variables to record")
    if sweep:
        p.add_argument("--n-ic", type=int, default=None,
                       help="number of sampled initial conditions (default 8)")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed for sampling (default 0)")
        p.add_argument("--region-seed", default=None,
                       help="comma pair seeding the region (default: entry start)")
        p.add_argument("--ic-file", default=None,
                       help="JSON file with explicit initial conditions")


def build_parser():
    parser = _Parser(prog="platodyn",
                     description="Hamiltonian laboratory for polyhedral and "
                                 "dihedral potentials")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list the potential catalog")

    p_orbit = sub.add_parser("orbit", help="integrate one orbit to CSV")
    _add_run_flags(p_orbit)

    p_section = sub.add_parser("section",
                               help="orbit plus surface-of-section output")
    _add_run_flags(p_section, section=True)

    p_sweep = sub.add_parser("sweep",
                             help="seeded multi-orbit section sweep with verdicts")
    _add_run_flags(p_sweep, section=True, sweep=True)

    sub.add_parser("validate", help="run the cross-module invariant suite")

    p_jac = sub.add_parser("jacobi", help="symmetry-adapted R^4 coordinate map")
    p_jac.add_argument("--forward", default=None, metavar="X1,X2,X3,X4")
    p_jac.add_argument("--inverse", default=None, metavar="U1,U2,U3,U4")

    return parser


# ---------------------------------------------------------------------------
# config merging

_CONFIG_KEYS = {
    "potential": str, "params": str, "negate": bool, "tmax": float,
    "step": float, "adaptive": bool, "tol": str, "energy": float,
    "out_dir": str, "section_trigger": str, "section_value": float,
    "direction": str, "record": str, "n_ic": int, "seed": int,
    "region_seed": str, "ic_file": str,
}

_RUN_DEFAULTS = {
    "tmax": 50.0, "step": 0.002, "tol": "1e-10", "out_dir": ".",
    "direction": "positive", "n_ic": 8, "seed": 0,
}


def _merge_config(args):
    """Fill unset flags from the INI file, then from built-in defaults."""
    values = {}
    if getattr(args, "config", None):
        ini = configparser.ConfigParser()
        read = ini.read(args.config)
        if not read:
            raise UsageError(f"config file {args.config!r} not found")
        source = dict(ini["DEFAULT"])
        if ini.has_section("run"):
            source.update(ini["run"])
        for raw_key, raw in source.items():
            key = raw_key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {raw_key!r}")
            kind = _CONFIG_KEYS[key]
            if kind is bool:
                values[key] = str(raw).strip().lower() in ("1", "true", "yes", "on")
            elif kind in (int, float):
                values[key] = kind(raw)
            else:
                values[key] = raw
    for key, value in values.items():
        if not hasattr(args, key):
            continue
        current = getattr(args, key)
        if current in (None, False):
            if key == "params" and isinstance(value, str):
                value = value.split()
            setattr(args, key, value)
    for key, default in _RUN_DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, default)
    return args


def _integrator_config(args):
    rtol, atol = _parse_tol(args.tol)
    return IntegratorConfig(method="adaptive" if args.adaptive else "rk4",
                            h=args.step, t0=None, t1=args.tmax,
                            rtol=rtol, atol=atol)


# ---------------------------------------------------------------------------
# initial conditions

def _lifted_start(spec, sys):
    q0 = spec.default_start
    if q0 is None:
        raise UsageError(f"{spec.name} has no default start; pass coordinates")
    if len(q0) == sys.dof:
        return tuple(q0)
    if len(q0) == sys.dof - 1 and sys.level == "H3-euclid3":
        return (1.0,) + tuple(q0)
    if sys.level == "H4-euclid4":
        pad = (0.0, 1.0)[:sys.dof - len(q0)]
        return pad + tuple(q0)
    raise UsageError(f"default start of {spec.name} does not fit {sys.level}")


def _state_from_flags(spec, sys, args):
    chart = sys.chart
    if getattr(args, "ic_file", None):
        with open(args.ic_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = [data]
        elif data and isinstance(data[0], (int, float)):
            data = [data]
        entry = data[0]
        if isinstance(entry, dict):
            q, p = tuple(entry["q"]), tuple(entry["p"])
        else:
            entry = tuple(entry)
            q, p = entry[:sys.dof], entry[sys.dof:]
        return PhaseState(chart=chart, q=q, p=p)

    q_flags = [getattr(args, f"{c}0", None) for c in chart.coords]
    p_flags = [getattr(args, f"p_{c}0", None) for c in chart.coords]
    if all(v is None for v in q_flags) and all(v is None for v in p_flags):
        _, state = default_state(spec, energy=args.energy)
        return state

    base = _lifted_start(spec, sys)
    q = tuple(v if v is not None else base[i] for i, v in enumerate(q_flags))
    if any(v is not None for v in p_flags):
        if args.energy is not None:
            raise UsageError("--energy conflicts with explicit momenta")
        p = tuple(v if v is not None else 0.0 for v in p_flags)
        return PhaseState(chart=chart, q=q, p=p)
    zero = (0.0,) * sys.dof
    v0 = sys.hamiltonian(q, zero)
    if not math.isfinite(v0):
        raise SingularityError("initial position is on the singular set")
    kinetic = 0.5 * max(1.0, abs(v0)) if args.energy is None else args.energy - v0
    if kinetic <= 0.0:
        raise UsageError(f"energy {args.energy} is below the potential "
                         f"value {v0:.6g} at the start")
    direction = (0.8, 0.5, 0.3, 0.2)[:sys.dof]
    norm = math.sqrt(sum(d * d for d in direction))
    unit = tuple(math.sqrt(2.0 * kinetic) / norm * d for d in direction)
    return PhaseState(chart=chart, q=q, p=fiber_momenta(chart, q, unit))


def _section_spec(sys, state, args):
    trigger = args.section_trigger or _DEFAULT_TRIGGER[sys.chart.kind]
    if args.section_value is not None:
        value = args.section_value
    else:
        value = state.var(trigger)
    direction = {"positive": 1, "negative": -1, "both": 0}[args.direction]
    record = None
    if args.record:
        record = tuple(s.strip() for s in str(args.record).split(","))
    return SectionSpec(trigger=trigger, value=value, direction=direction,
                       record=record)


# ---------------------------------------------------------------------------
# manifest

def _effective_config(args):
    skip = {"command", "config"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        out[key] = value
    return out


def _write_manifest(out_dir, command, args, seed, orbits, outputs, t_start):
    payload = {
        "command": command,
        "config": _effective_config(args),
        "seed": seed,
        "catalog_version": CATALOG_VERSION,
        "orbits": orbits,
        "outputs": sorted(outputs + ["manifest.json"]),
        "wall_time_seconds": round(time.monotonic() - t_start, 3),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _orbit_entry(ic_id, trace):
    return {"ic_id": ic_id, "max_drift": trace.rel_drift,
            "steps": trace.steps, "flag": trace.flag,
            "message": trace.message}


def _require_potential(args):
    if not args.potential:
        raise UsageError("--potential is required")
    return make(args.potential, negate=args.negate,
                **_parse_params(args.params))


def _threads():
    try:
        return max(1, int(os.environ.get("PLATONIC_DYN_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands

def cmd_catalog(args):
    print(f"catalog version {CATALOG_VERSION}")
    for spec in catalog():
        sym = spec.symmetry or "-"
        params = ",".join(f"{k}={v}" for k, v in spec.params.items()) or "-"
        print(f"{spec.name:16} {spec.chart.kind:20} params: {params:28} "
              f"symmetry: {sym}")
        if spec.singular_set:
            print(f"{'':16} singular set: {spec.singular_set}")
    return EXIT_OK


def cmd_orbit(args):
    t_start = time.monotonic()
    spec = _require_potential(args)
    sys_ = natural_system(spec)
    state = _state_from_flags(spec, sys_, args)
    cfg = _integrator_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    trace = integrate(sys_, state, cfg)
    csv_path = os.path.join(args.out_dir, "orbit.csv")
    write_orbit_csv(trace, csv_path)
    _write_manifest(args.out_dir, "orbit", args, None,
                    [_orbit_entry(0, trace)], ["orbit.csv"], t_start)
    if trace.flag is not None:
        print(f"orbit aborted: {trace.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"orbit.csv: {len(trace.times)} samples, max relative drift "
          f"{trace.rel_drift:.3e}")
    return EXIT_OK


def cmd_section(args):
    t_start = time.monotonic()
    spec = _require_potential(args)
    sys_ = natural_system(spec)
    state = _state_from_flags(spec, sys_, args)
    cfg = _integrator_config(args)
    sec = _section_spec(sys_, state, args)
    os.makedirs(args.out_dir, exist_ok=True)
    ps = compute_section_both(sys_, state, cfg, sec)
    csv_path = os.path.join(args.out_dir, "section.csv")
    svg_path = os.path.join(args.out_dir, "section.svg")
    write_section_csv(csv_path, [ps])
    render_section_figure(svg_path, [ps],
                          title=f"{spec.name}: {sec.trigger} = {sec.value:.6g}")
    orbits = [{"ic_id": 0, "max_drift": None, "steps": ps.steps,
               "flag": ps.flag, "message": ps.message,
               "crossings": int(ps.n), "discarded": ps.discarded}]
    _write_manifest(args.out_dir, "section", args, None, orbits,
                    ["section.csv", "section.svg"], t_start)
    if ps.flag is not None:
        print(f"section run aborted: {ps.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"section.csv: {ps.n} crossings ({ps.discarded} discarded)")
    return EXIT_OK


def _sweep_states(spec, sys_, args):
    if args.ic_file:
        with open(args.ic_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = [data]
        states = []
        for entry in data:
            if isinstance(entry, dict):
                q, p = tuple(entry["q"]), tuple(entry["p"])
            else:
                entry = tuple(entry)
                q, p = entry[:sys_.dof], entry[sys_.dof:]
            states.append(PhaseState(chart=sys_.chart, q=q, p=p))
        return states
    if args.energy is None:
        raise UsageError("sweep sampling needs --energy (or --ic-file)")
    if args.region_seed:
        seed_pt = _parse_floats(args.region_seed, 2, "--region-seed")
    else:
        seed_pt = spec.default_start
    region = find_region(spec, seed_pt)
    return sample_initial_conditions(sys_, region, args.energy, args.n_ic,
                                     seed=args.seed)


def cmd_sweep(args):
    t_start = time.monotonic()
    spec = _require_potential(args)
    sys_ = natural_system(spec)
    states = _sweep_states(spec, sys_, args)
    cfg = _integrator_config(args)
    os.makedirs(args.out_dir, exist_ok=True)

    def one(item):
        ic_id, state = item
        sec = _section_spec(sys_, state, args)
        return compute_section_both(sys_, state, cfg, sec, ic_id=ic_id)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        point_sets = list(pool.map(one, enumerate(states)))

    verdicts = []
    curve = 0
    for ps in point_sets:
        v = classify_section(ps)
        verdicts.append({
            "ic_id": ps.ic_id, "n_points": v.n_points,
            "dimension": None if math.isnan(v.dimension) else v.dimension,
            "label": v.label, "discarded": ps.discarded, "flag": ps.flag,
        })
        curve += v.label == "curve-like"
    fraction = curve / len(point_sets) if point_sets else 0.0

    csv_path = os.path.join(args.out_dir, "sections.csv")
    svg_path = os.path.join(args.out_dir, "sections.svg")
    verdict_path = os.path.join(args.out_dir, "verdict.json")
    write_section_csv(csv_path, point_sets)
    render_section_figure(svg_path, point_sets,
                          title=f"{spec.name} sweep, E = {args.energy}")
    verdict = {
        "potential": spec.name,
        "params": {k: v for k, v in spec.params.items()},
        "energy": args.energy,
        "seed": args.seed if not args.ic_file else None,
        "ics": [{"ic_id": i, "q": list(s.q), "p": list(s.p)}
                for i, s in enumerate(states)],
        "verdicts": verdicts,
        "fraction_curve_like": fraction,
    }
    with open(verdict_path, "w", encoding="utf-8") as fh:
        json.dump(verdict, fh, indent=2, sort_keys=True)
        fh.write("\n")

    orbits = [{"ic_id": ps.ic_id, "steps": ps.steps, "flag": ps.flag,
               "crossings": int(ps.n), "discarded": ps.discarded}
              for ps in point_sets]
    _write_manifest(args.out_dir, "sweep", args, verdict["seed"], orbits,
                    ["sections.csv", "sections.svg", "verdict.json"], t_start)
    for v in verdicts:
        dim = "nan" if v["dimension"] is None else f"{v['dimension']:.3f}"
        print(f"ic {v['ic_id']}: {v['n_points']:5d} points  dim {dim:>5}  "
              f"{v['label']}")
    print(f"fraction curve-like: {fraction:.3f}")
    return EXIT_OK


def cmd_validate(args):
    failures = 0

    def report(name, value, ok, note=""):
        nonlocal failures
        mark = "ok  " if ok else "FAIL"
        failures += not ok
        extra = f"  {note}" if note else ""
        print(f"{mark} {name}: {value:.3e}{extra}")

    for grp in (tetrahedral_group(), octahedral_group(), icosahedral_group(),
                symmetry_group("dihedral(3)")):
        checks = group_checks(grp)
        worst = max(checks["orthogonality"], checks["determinant"],
                    checks["identity"])
        report(f"group {grp.name} (order {grp.order})", worst, checks["ok"])

    pairs = (("T", tetrahedral_group()), ("O", octahedral_group()),
             ("TO", octahedral_group()), ("I", icosahedral_group()))
    for pname, grp in pairs:
        res = check_invariance(POLYNOMIALS[pname].evaluate, grp, samples=300)
        report(f"invariance {pname} under {grp.name}", res, res <= 1e-9)

    for vname in ("V_T", "V_O", "V_TO"):
        spec = make(vname)
        res = factorization_check(spec, POLYNOMIALS[spec.polynomial],
                                  samples=300)
        report(f"factorization {vname}", res, res <= 1e-9)
    spec = make("V_I")
    res = factorization_check(spec, POLYNOMIALS["I"], samples=300)
    report("factorization V_I (arbiter residual)", res, res <= 1e-6,
           note="reported either way")

    for name in CATALOG_NAMES:
        spec = make(name)
        res = gradient_check(spec, samples=150)
        report(f"gradient {name}", res, res <= 1e-6)

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        x = tuple(rng.uniform(-2, 2, size=4))
        back = jacobi_inverse(jacobi_forward(x))
        worst = max(worst, max(abs(a - b) for a, b in zip(x, back)))
    report("jacobi round trip", worst, worst <= 1e-12)

    spec = make("V_4")
    sys_, state = default_state(spec, energy=6.0)
    cfg = IntegratorConfig(method="adaptive", t1=5.0, rtol=1e-10, atol=1e-10)
    trace = integrate(sys_, state, cfg)
    drift = integral_drift(trace, "Q4")
    report("Q4 drift on V_4 (t <= 5)", drift, drift <= 1e-8)

    print("validation", "FAILED" if failures else "passed",
          f"({failures} failing checks)" if failures else "")
    return EXIT_VALIDATION if failures else EXIT_OK


def cmd_jacobi(args):
    if (args.forward is None) == (args.inverse is None):
        raise UsageError("pass exactly one of --forward or --inverse")
    if args.forward is not None:
        values = jacobi_forward(_parse_floats(args.forward, 4, "--forward"))
    else:
        values = jacobi_inverse(_parse_floats(args.inverse, 4, "--inverse"))
    print(",".join(f"{v:.12g}" for v in values))
    return EXIT_OK


_COMMANDS = {
    "catalog": cmd_catalog,
    "orbit": cmd_orbit,
    "section": cmd_section,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "jacobi": cmd_jacobi,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("orbit", "section", "sweep"):
            _merge_config(args)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingularityError as exc:
        print(f"singular initial state: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
