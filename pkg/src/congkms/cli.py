"""Command line interface: `congkms <subcommand> --config sys.json [options]`.

Exit status 0 on success, 1 on a domain error (or failed check), 2 on a
configuration or usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys as _sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import ConfigError, describe, load_config
from .congruence import SystemDescriptor
from .dirichlet import WHICH, build_zeta, evaluate, recover_scale, residue_estimate
from .field import element_to_json, format_element
from .invariants import compare_systems, extract_invariants, kronecker_set, minimal_census, residue_report
from .kms import (gibbs_partition, hamiltonian_spectrum, kms_eval_formula, make_orbit_trace,
                  partition_function, random_monomials)
from .operators import TruncatedRep, kms_condition_residual, kms_eval_trace
from .toral import finite_orbits, fixed_points, orbit_size_census, toral_action

COMMANDS = ("field-info", "zeta", "classgroup", "fixed-points", "orbits", "partition", "kms-check",
            "invariants", "census", "kronecker", "compare")


class CheckFailed(Exception):
    """A computed check did not hold; the report is still written."""


def _point(p):
    return [str(c) for c in p]


def _class_arg(sys: SystemDescriptor, raw: str | None):
    classes = sys.class_data.classes()
    if raw is None:
        return None
    try:
        vec = tuple(int(v) for v in raw.split(",")) if raw else ()
    except ValueError as exc:
        raise ConfigError(f"--class expects comma-separated integers, got {raw!r}") from exc
    vec = sys.class_data.group.reduce(vec) if vec else vec
    if vec not in classes:
        raise ConfigError(f"class {list(vec)} is not in {[list(c) for c in classes]}")
    return vec


# --------------------------------------------------------------------------
# subcommands; each returns (payload, table rows, figure callback or None)


def cmd_field_info(sys, args):
    f = sys.field
    U = f.units
    units = sys.units
    payload = {"field": f.name(), "d": f.d, "discriminant": f.discriminant if f.d is not None else 1,
               "omega": f.omega_rule, "real_places": f.real_places, "complex_places": f.complex_places,
               "roots_of_unity": U.w,
               "fundamental_unit": None if U.fundamental is None else format_element(U.fundamental),
               "regulator": None if U.fundamental is None else float(U.regulator),
               "restricted_units": {"torsion_order": units.torsion_order,
                                    "torsion_generator": format_element(units.torsion_generator),
                                    "free_generator": None if units.free_generator is None
                                    else format_element(units.free_generator)}}
    rows = [{"key": k, "value": v if not isinstance(v, dict) else json.dumps(v)} for k, v in payload.items()]
    return payload, rows, None


def cmd_classgroup(sys, args):
    cd = sys.class_data
    classes = [{"class": list(k), "representative_hnf": list(cd.representatives[k].hnf()[:3]),
                "min_norm": cd.min_norm(k)} for k in cd.classes()]
    payload = {"order": cd.order, "cyclic_orders": list(cd.group.cyclic_orders),
               "closed_form_order": cd.closed_form_order, "degenerate_gamma": cd.degenerate_gamma,
               "ideal_class_number": cd.cl.order, "residue_invariants": cd.residue_invariants,
               "classes": classes}
    if cd.order != cd.closed_form_order:
        raise CheckFailed(payload)
    return payload, classes, None


def cmd_zeta(sys, args):
    X = args.bound or sys.truncation
    kappa = _class_arg(sys, args.class_)
    if args.which == "partial" and kappa is None:
        kappa = sys.class_data.identity()
    z = build_zeta(sys, args.which, X, kappa)
    payload = {"which": args.which, "class": None if kappa is None else list(kappa), "X": X,
               "coefficients": z.as_dict(), "residue_estimate": residue_estimate(z).as_dict()}
    if args.beta is not None:
        payload["evaluation"] = evaluate(z, args.beta, args.precision).as_dict()
    rows = [{"n": n, "a_n": a} for n, a in z.as_dict().items()]

    def fig(path):
        from .plotting import series_figure
        return series_figure(z.coefficients, f"{z.label} ({sys.name()})", path)
    return payload, rows, fig


def cmd_fixed_points(sys, args):
    out = []
    pts_all = None
    for k in sys.class_data.classes():
        act = toral_action(sys, sys.class_data.representatives[k])
        fp = fixed_points(act)
        out.append({"class": list(k), "finite": fp.finite, "count": fp.count if fp.finite else "inf",
                    "points": [_point(p) for p in fp.representatives]})
        if pts_all is None:
            pts_all = [[float(c) for c in p] for p in fp.representatives]
    counts = {o["count"] for o in out}
    payload = {"classes": out, "solidarity": len(counts) == 1}
    rows = [{"class": o["class"], "count": o["count"], "points": json.dumps(o["points"])} for o in out]
    if len(counts) != 1:
        raise CheckFailed(payload)

    def fig(path):
        from .plotting import fixed_point_figure
        return fixed_point_figure(pts_all or [], f"fixed points ({sys.name()})", path)
    return payload, rows, fig if pts_all else None


def cmd_orbits(sys, args):
    N = args.bound or 12
    kappa = _class_arg(sys, args.class_) or sys.class_data.identity()
    act = toral_action(sys, sys.class_data.representatives[kappa])
    if act.trivial:
        raise ValueError("R*_(m,Γ) is trivial: every point is fixed")
    orbs = finite_orbits(act, N)
    sizes = orbit_size_census(act, N)
    rows = [{"base_point": _point(o.points[0]), "size": o.size, **o.isotropy()} for o in orbs]
    payload = {"class": list(kappa), "denominator": N, "orbits": rows,
               "size_census_up_to_denominator": sizes}

    def fig(path):
        from .plotting import orbit_figure
        return orbit_figure([o.size for o in orbs], f"orbits on {N}-torsion ({sys.name()})", path)
    return payload, rows, fig


def cmd_partition(sys, args):
    X = args.bound or sys.truncation
    beta = 3.0 if args.beta is None else args.beta
    rows = []
    curves = {}
    for k in sys.class_data.classes():
        Z = partition_function(sys, k, 1, X)
        ev = Z.evaluate(beta, args.precision)
        scale, _ = recover_scale(Z)
        spec = hamiltonian_spectrum(sys, k, X, 1)
        g = gibbs_partition(spec, beta)
        rows.append({"class": list(k), "min_norm": Z.scale, "recovered_scale": scale, "beta": beta,
                     "value": float(ev.value), "tail_bound": float(ev.tail_bound),
                     "gibbs_partition": float(g.Z), "X": X})
        curves[str(list(k))] = Z
    payload = {"beta": beta, "X": X, "classes": rows}

    def fig(path):
        from .plotting import partition_figure
        betas = np.linspace(2.2, 6.0, 40)
        data = {}
        for key, Z in curves.items():
            lam, c = (np.array(v, dtype=float) for v in zip(*Z.exponents()))
            # float curves are for display only
            data[key] = (list(betas), [float(np.sum(c * np.exp(-b * lam))) for b in betas])
        return partition_figure(data, f"partition functions ({sys.name()})", path)
    return payload, rows, fig


def cmd_kms_check(sys, args):
    beta = 3.0 if args.beta is None else args.beta
    X = args.bound or 200
    rng = np.random.default_rng(args.seed)
    mons = random_monomials(sys, args.count, rng)
    classes = sys.class_data.classes()
    reps = {}
    rows = []
    for i, m in enumerate(mons):
        k = classes[i % len(classes)]
        if k not in reps:
            tr = make_orbit_trace(sys, k)
            reps[k] = TruncatedRep(sys, k, X, tr)
        rep = reps[k]
        a = kms_eval_formula(sys, m, beta, k, rep.trace, X)
        b = kms_eval_trace(sys, m, beta, k, rep.trace, X, rep)
        partner = mons[(i + 1) % len(mons)]
        res = kms_condition_residual(sys, beta, m, partner, k, rep.trace, X, rep)
        tail = a.tail_bound + b.tail_bound
        diff = abs(a.value - b.value)
        rows.append({"index": i, "class": list(k), "monomial": str(m), "formula_re": a.value.real,
                     "formula_im": a.value.imag, "trace_re": b.value.real, "trace_im": b.value.imag,
                     "route_difference": diff, "tail_bound": tail, "kms_residual": res["residual"],
                     "kms_tail_bound": res["tail_bound"],
                     "ok": bool(diff <= tail and res["ok"])})
    payload = {"beta": beta, "X": X, "seed": args.seed, "count": len(rows),
               "all_within_tails": all(r["ok"] for r in rows), "rows": rows}
    if not payload["all_within_tails"]:
        raise CheckFailed(payload)

    def fig(path):
        from .plotting import residual_figure
        return residual_figure(rows, f"KMS checks β={beta}, X={X}", path)
    return payload, rows, fig


def cmd_census(sys, args):
    c = minimal_census(sys, args.bound or None)
    payload = c.as_dict()
    payload["residues"] = residue_report(sys, args.bound or None)
    rows = [c_.as_dict() for c_ in c.per_class]
    if not (c.formula_holds and c.identity_holds and c.limit_at_infinity == c.multiplier):
        raise CheckFailed(payload)

    def fig(path):
        from .plotting import census_figure
        return census_figure(rows, f"minimal components ({sys.name()})", path)
    return payload, rows, fig


def cmd_invariants(sys, args):
    r = extract_invariants(sys, args.bound or None)
    payload = r.as_dict()
    rows = [{"invariant": k, "value": json.dumps(v) if isinstance(v, (dict, list)) else v}
            for k, v in payload.items() if k != "routes"]

    def fig(path):
        from .plotting import prime_set_figure
        return prime_set_figure(sorted(r.norm_prime_set), r.X, f"norm primes ({sys.name()})", path)
    return payload, rows, fig


def cmd_kronecker(sys, args):
    bound = args.bound or sys.truncation
    ks = sorted(kronecker_set(sys, bound))
    payload = {"bound": bound, "count": len(ks), "primes": ks}
    rows = [{"p": p} for p in ks]

    def fig(path):
        from .plotting import prime_set_figure
        return prime_set_figure(ks, bound, f"Kronecker set ({sys.name()})", path)
    return payload, rows, fig


def cmd_compare(sys, args):
    if not args.config2:
        raise ConfigError("compare needs --config2")
    other = load_config(args.config2)
    bound = args.bound or min(sys.truncation, other.truncation)
    rep = compare_systems(sys, other, bound)
    payload = rep.as_dict()
    payload["system_B"] = describe(other)
    rows = [{"check": k, "value": json.dumps(v) if isinstance(v, (dict, list)) else v}
            for k, v in payload.items() if k != "system_B"]
    return payload, rows, None


HANDLERS = {"field-info": cmd_field_info, "zeta": cmd_zeta, "classgroup": cmd_classgroup,
            "fixed-points": cmd_fixed_points, "orbits": cmd_orbits, "partition": cmd_partition,
            "kms-check": cmd_kms_check, "invariants": cmd_invariants, "census": cmd_census,
            "kronecker": cmd_kronecker, "compare": cmd_compare}


# --------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Fraction):
        return str(x)
    if hasattr(x, "field") and hasattr(x, "coords"):
        return element_to_json(x)
    if x is None or isinstance(x, (int, float, str, bool)):
        return x
    return str(x)


def render(payload: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(payload), indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    meta = payload.get("system", {})
    for k, v in meta.items():
        buf.write(f"# {k}\t{v}\n")
    if rows:
        keys = list(rows[0])
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([json.dumps(_jsonable(r[k]), ensure_ascii=False)
                        if isinstance(r.get(k), (list, dict)) else _jsonable(r.get(k)) for k in keys])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="congkms", description="Congruence monoid C*-dynamics toolkit")
    p.add_argument("command", choices=COMMANDS, metavar="command", help=" | ".join(COMMANDS))
    p.add_argument("--config", required=True, help="system JSON")
    p.add_argument("--config2", help="second system JSON (compare)")
    p.add_argument("--bound", type=int, help="truncation X, prime bound or torsion denominator")
    p.add_argument("--beta", type=float, help="inverse temperature")
    p.add_argument("--precision", type=int, default=30, help="mpmath decimal digits")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--figure", help="also render a figure to this path (png/pdf/svg)")
    p.add_argument("--which", choices=WHICH, default="modulus", help="series for `zeta`")
    p.add_argument("--class", dest="class_", help="class vector, comma-separated")
    p.add_argument("--count", type=int, default=20, help="monomials for `kms-check`")
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    status = 0
    try:
        if args.bound is not None and args.bound < 1:
            raise ConfigError("--bound must be positive")
        if args.precision < 5:
            raise ConfigError("--precision must be at least 5")
        sys = load_config(args.config)
        try:
            payload, rows, fig = HANDLERS[args.command](sys, args)
        except CheckFailed as exc:
            payload, rows, fig = exc.args[0], [], None
            status = 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except (ValueError, ArithmeticError, AssertionError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    payload = {"command": args.command, "system": describe(sys), **payload}
    if args.figure and fig is not None:
        payload["figure"] = str(fig(args.figure))
    text = render(payload, rows if rows else [], args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        _sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
