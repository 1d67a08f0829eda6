"""Command-line entry point: batch verifications with JSON reports.

Every subcommand prints a human summary, optionally writes a JSON report,
and exits 0 on full success, 1 on a genuine mathematical counterexample,
2 when a budget made the run inconclusive, and 3 on usage errors.  Reports
are deterministic for a fixed configuration and seed, up to the *_ms timing
fields.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .charts import (
    chart_by_substitution,
    fibre_chart,
    fibre_witness_point,
    euler_identity_check,
    quotient_nonzero_check,
    smoothness_certificate,
    total_space_chart,
    verify_cover,
)
from .groebner import (
    GroebnerBudget,
    Inconclusive,
    Ideal,
    contains_one,
    ideals_equal,
    krull_dimension,
    read_ideal_text,
    write_ideal_text,
)
from .invariants import (
    WVPoint,
    determinantal_minors,
    fibre_zero_presentation,
    kernel_ideal,
    minors_ideal,
    pi_delta_forms_symbolic,
    pi_map,
    verify_conjecture,
    verify_minors_vanish,
)
from .poly import QQ, parse_field
from .quiver import ArmParams, ChartId, all_chart_ids, build_star_quiver
from .reconstruction import (
    deformed_relations,
    delta_forms,
    in_delta,
    parse_gamma_spec,
    rep_ideal,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


def _budget(args) -> GroebnerBudget:
    return GroebnerBudget(
        max_spairs=args.spair_cap,
        max_degree=args.deg_cap,
        time_cap=args.time_cap,
    )


def _config_echo(args, extra=None) -> dict:
    cfg = {
        "p": args.p,
        "field": args.field,
        "budgets": {
            "spair_cap": args.spair_cap,
            "deg_cap": args.deg_cap,
            "time_cap": args.time_cap,
        },
        "jobs": args.jobs,
    }
    if getattr(args, "gamma", None) is not None:
        cfg["gamma"] = args.gamma
    if getattr(args, "height", None) is not None:
        cfg["height"] = args.height
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if extra:
        cfg.update(extra)
    return cfg


def _emit(report: dict, args) -> None:
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _status_exit(items_ok: bool, inconclusive: bool) -> tuple[str, int]:
    if not items_ok:
        return "fail", EXIT_FAIL
    if inconclusive:
        return "inconclusive", EXIT_INCONCLUSIVE
    return "ok", EXIT_OK


# ---------------------------------------------------------------------------
# chart pipelines
# ---------------------------------------------------------------------------

def _fibre_chart_item(task) -> dict:
    p_spec, gamma_spec, cid, field_spec, budget_tuple = task
    p = ArmParams.parse(p_spec)
    field = parse_field(field_spec)
    budget = GroebnerBudget(*budget_tuple)
    gamma = parse_gamma_spec(gamma_spec, p, field)
    Q = build_star_quiver(p, field)
    c = ChartId(*cid)
    pres = fibre_chart(p, gamma, c, field)
    cert = smoothness_certificate(pres, expected_dim=2, budget=budget)
    try:
        oracle = ideals_equal(pres.ideal(budget),
                              chart_by_substitution(Q, gamma, c).ideal(budget))
    except Inconclusive:
        oracle = None
    return {
        "id": c.label(),
        "variables": list(pres.table.names),
        "relations": [r.to_str() for r in pres.relations],
        "certificate": {
            "one_in_jacobian": cert.one_in_jacobian,
            "dimension": None if cert.dimension is None else cert.dimension.dimension,
            "witness": None if cert.dimension is None else list(cert.dimension.witness),
            "status": cert.status,
        },
        "oracle_match": oracle,
    }


def cmd_charts(args) -> int:
    p = ArmParams.parse(args.p)
    bt = (args.spair_cap, args.deg_cap, args.time_cap)
    t0 = time.monotonic()
    tasks = [(args.p, args.gamma, (c.k, c.i, c.j), args.field, bt)
             for c in all_chart_ids(p)]
    items = _pmap(_fibre_chart_item, tasks, args.jobs)
    ok = all(it["certificate"]["status"] == "smooth" and it["oracle_match"] is True
             for it in items)
    failed = any(it["certificate"]["status"] == "singular"
                 or it["oracle_match"] is False for it in items)
    inconc = any(it["certificate"]["status"] == "inconclusive"
                 or it["oracle_match"] is None for it in items)
    status, code = _status_exit(not failed, inconc)
    report = {
        "command": "charts",
        "config": _config_echo(args),
        "items": items,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    smooth = sum(1 for it in items if it["certificate"]["status"] == "smooth")
    print(f"charts: p={p.label()} gamma={args.gamma}: {smooth}/{len(items)} "
          f"fibre charts smooth of dimension 2, oracle "
          f"{'agrees' if ok else 'DISAGREES or inconclusive'} -> {status}")
    return code


def _total_chart_item(task) -> dict:
    p_spec, cid, field_spec, budget_tuple = task
    p = ArmParams.parse(p_spec)
    field = parse_field(field_spec)
    budget = GroebnerBudget(*budget_tuple)
    c = ChartId(*cid)
    pres = total_space_chart(p, c, field)
    expected = p.p1 + p.p2 + p.p3 + 1
    cert = smoothness_certificate(pres, expected_dim=expected, budget=budget)
    return {
        "id": c.label(),
        "variables": list(pres.table.names),
        "relations": [r.to_str() for r in pres.relations],
        "certificate": {
            "one_in_jacobian": cert.one_in_jacobian,
            "dimension": None if cert.dimension is None else cert.dimension.dimension,
            "status": cert.status,
        },
        "expected_dimension": expected,
    }


def cmd_smooth(args) -> int:
    p = ArmParams.parse(args.p)
    bt = (args.spair_cap, args.deg_cap, args.time_cap)
    t0 = time.monotonic()
    tasks = [(args.p, (c.k, c.i, c.j), args.field, bt) for c in all_chart_ids(p)]
    items = _pmap(_total_chart_item, tasks, args.jobs)
    failed = any(it["certificate"]["status"] == "singular" for it in items)
    inconc = any(it["certificate"]["status"] == "inconclusive" for it in items)
    status, code = _status_exit(not failed, inconc)
    report = {
        "command": "smooth",
        "config": _config_echo(args),
        "items": items,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print(f"smooth: p={p.label()}: {sum(it['certificate']['status'] == 'smooth' for it in items)}"
          f"/{len(items)} total-space charts smooth of dimension "
          f"{p.p1 + p.p2 + p.p3 + 1} -> {status}")
    return code


def cmd_cover(args) -> int:
    p = ArmParams.parse(args.p)
    t0 = time.monotonic()
    try:
        rep = verify_cover(p, enumeration_cap=args.enum_cap)
    except ValueError as exc:
        print(f"cover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, code = _status_exit(rep.ok, False)
    Q = build_star_quiver(p)
    report = {
        "command": "cover",
        "config": _config_echo(args, {"enum_cap": args.enum_cap}),
        "quiver": Q.summary(),
        "total_supports": rep.total_supports,
        "stable_supports": rep.stable_supports,
        "checked_supports": rep.checked_supports,
        "covered_supports": rep.covered_supports,
        "counterexamples": [list(c) for c in rep.counterexamples],
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print(f"cover: p={p.label()}: {rep.total_supports} supports scanned, "
          f"{rep.checked_supports} stable+compatible, "
          f"{len(rep.counterexamples)} counterexamples -> {status}")
    return code


def cmd_fibre(args) -> int:
    p = ArmParams.parse(args.p)
    field = parse_field(args.field)
    t0 = time.monotonic()
    gamma = parse_gamma_spec(args.gamma, p, field)
    inside = in_delta(gamma, field)
    forms = delta_forms(gamma, field)
    item: dict = {
        "gamma": gamma.to_json(),
        "in_delta": inside,
        "delta_forms": [str(f) for f in forms],
    }
    inconclusive = False
    if inside:
        Q = build_star_quiver(p, field)
        point = fibre_witness_point(p, gamma, field)
        rels = deformed_relations(Q, gamma)
        satisfied = all(r.evaluate(point) == field.zero for _, r in rels)
        item["witness_point"] = {a: str(v) for a, v in sorted(point.items())}
        item["witness_satisfies_relations"] = satisfied
        ok = satisfied
    else:
        try:
            unit = contains_one(rep_ideal(Q=build_star_quiver(p, field), gamma=gamma,
                                          budget=_budget(args)))
            item["one_in_rep_ideal"] = unit
            ok = unit
        except Inconclusive as exc:
            item["one_in_rep_ideal"] = None
            item["inconclusive"] = str(exc)
            ok, inconclusive = True, True
    status, code = _status_exit(ok, inconclusive)
    report = {
        "command": "fibre",
        "config": _config_echo(args),
        "item": item,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    kind = "nonempty (witness point found)" if inside else "empty (1 in relation ideal)"
    print(f"fibre: p={p.label()} gamma={args.gamma}: in_delta={inside}, "
          f"fibre {kind if ok else 'CHECK FAILED'} -> {status}")
    return code


def cmd_pi(args) -> int:
    p = ArmParams.parse(args.p)
    t0 = time.monotonic()
    f1, f2 = pi_delta_forms_symbolic(p)
    symbolic_ok = f1.is_zero() and f2.is_zero()
    item = {"symbolic_forms_vanish": symbolic_ok}
    ok = symbolic_ok
    if args.point:
        with open(args.point, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        pt = WVPoint(
            betas=tuple(QQ.coerce(str(v)) for v in data["betas"]),
            alphas=tuple(tuple(QQ.coerce(str(v)) for v in arm) for arm in data["alphas"]),
        )
        gamma = pi_map(pt, p)
        item["gamma"] = gamma.to_json()
        item["in_delta"] = in_delta(gamma)
        ok = ok and item["in_delta"]
    status, code = _status_exit(ok, False)
    report = {
        "command": "pi",
        "config": _config_echo(args, {"point": args.point}),
        "item": item,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print(f"pi: p={p.label()}: symbolic subspace membership "
          f"{'holds' if symbolic_ok else 'FAILS'} -> {status}")
    return code


def cmd_minors(args) -> int:
    p = ArmParams.parse(args.p)
    t0 = time.monotonic()
    ok = verify_minors_vanish(p, QQ)
    status, code = _status_exit(ok, False)
    report = {
        "command": "minors",
        "config": _config_echo(args),
        "minors": [m.to_str() for m in determinantal_minors(p, QQ)],
        "all_vanish_under_phi": ok,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print(f"minors: p={p.label()}: all three 2x2 minors vanish under phi "
          f"modulo the canonical relation: {ok} -> {status}")
    return code


def cmd_kernel(args) -> int:
    p = ArmParams.parse(args.p)
    field = parse_field(args.field)
    t0 = time.monotonic()
    minors_ok = verify_minors_vanish(p, QQ)
    fz_status = "inconclusive"
    fz = None
    try:
        kern = kernel_ideal(p, field, _budget(args))
        mins = minors_ideal(p, field)
        equal = ideals_equal(kern, mins)
        kgens = [g.to_str() for g in kern.groebner_basis()]
        status_word = "confirmed" if equal and minors_ok else "refuted"
        inconclusive = False
        fz = fibre_zero_presentation(p, field, _budget(args), kernel=kern)
        fz_status = fz.status
    except Inconclusive:
        kgens, equal, inconclusive = [], None, True
        status_word = "inconclusive"
    report = {
        "command": "kernel",
        "config": _config_echo(args),
        "p": args.p,
        "field": getattr(field, "name", "QQ"),
        "kernel_generators": kgens,
        "minors": [m.to_str() for m in determinantal_minors(p, field)],
        "containment_minors_in_kernel": minors_ok,
        "equal": equal,
        "status": status_word,
        "fibre_zero": None if fz is None else {
            "equal": fz.equal,
            "status": fz.status,
            "specialized_generators": list(fz.specialized_generators),
            "target_minors": list(fz.target_minors),
        },
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    ok = minors_ok and (equal is not False) and fz_status != "refuted"
    status, code = _status_exit(ok, inconclusive)
    print(f"kernel: p={p.label()} field={report['field']}: "
          f"{len(kgens)} kernel generators, equal to minors: {equal}, "
          f"origin fibre: {fz_status} -> {status}")
    return code


def cmd_conjecture(args) -> int:
    p = ArmParams.parse(args.p)
    field = parse_field(args.field)
    rep = verify_conjecture(p, field, _budget(args))
    report = {
        "command": "conjecture",
        "config": _config_echo(args),
        "p": args.p,
        "field": rep.field_name,
        "probabilistic": rep.probabilistic,
        "minors_in_kernel": rep.minors_in_kernel,
        "equal": rep.equal,
        "status": rep.status,
        "kernel_generators": list(rep.kernel_generators),
        "minors": list(rep.minors),
        "elapsed_ms": rep.elapsed_ms,
    }
    _emit(report, args)
    ok = rep.status != "refuted"
    status, code = _status_exit(ok, rep.status == "inconclusive")
    suffix = " (probabilistic)" if rep.probabilistic and rep.status == "confirmed" else ""
    print(f"conjecture: p={p.label()} field={rep.field_name}: {rep.status}{suffix}")
    return code


def cmd_gb(args) -> int:
    field = parse_field(args.field)
    t0 = time.monotonic()
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    ideal = read_ideal_text(text, field=field, budget=_budget(args))
    try:
        basis = ideal.groebner_basis()
        dim = krull_dimension(ideal)
        inconclusive = False
    except Inconclusive as exc:
        report = {
            "command": "gb",
            "config": _config_echo(args, {"input": args.input}),
            "status": "inconclusive",
            "reason": str(exc),
            "elapsed_ms": int((time.monotonic() - t0) * 1000),
        }
        _emit(report, args)
        print(f"gb: inconclusive ({exc})")
        return EXIT_INCONCLUSIVE
    report = {
        "command": "gb",
        "config": _config_echo(args, {"input": args.input}),
        "vars": list(ideal.table.names),
        "order": ideal.order.spec(),
        "reduced_basis": [g.to_str(ideal.order) for g in basis],
        "dimension": dim.dimension,
        "witness": list(dim.witness),
        "is_unit_ideal": contains_one(ideal),
        "status": "ok",
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print(f"gb: {len(ideal.gens)} generators -> reduced basis of "
          f"{len(basis)} elements, dimension {dim.dimension}")
    for g in basis:
        print("  " + g.to_str(ideal.order))
    if args.output:
        out = Ideal(ideal.table, basis, order=ideal.order, field=field)
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(write_ideal_text(out))
    return EXIT_OK


def cmd_props(args) -> int:
    t0 = time.monotonic()
    rng = random.Random(args.seed)
    suites = {}

    n_checks = 0
    for _ in range(args.euler_samples):
        n = rng.randint(0, 4)
        alphas = [QQ.coerce(f"{rng.randint(-10, 10)}/{rng.randint(1, 10)}") for _ in range(n)]
        if not euler_identity_check(n, alphas):
            suites["euler_identity"] = {"ok": False, "counterexample": [str(a) for a in alphas]}
            break
        n_checks += 1
    else:
        suites["euler_identity"] = {"ok": True, "checked": n_checks}

    n_checks = 0
    for _ in range(args.nonunit_samples):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        alphas = [QQ.coerce(rng.randint(-10, 10)) for _ in range(n)]
        betas = [QQ.coerce(rng.randint(-10, 10)) for _ in range(m - 1)]
        if not quotient_nonzero_check(alphas, betas, budget=_budget(args)):
            suites["quotient_nonzero"] = {
                "ok": False,
                "counterexample": {"alphas": [str(a) for a in alphas],
                                   "betas": [str(b) for b in betas]},
            }
            break
        n_checks += 1
    else:
        suites["quotient_nonzero"] = {"ok": True, "checked": n_checks}

    p = ArmParams.parse(args.p)
    Q = build_star_quiver(p)
    names = Q.table.names
    n_checks, balanced_ok = 0, True
    for _ in range(args.weight_samples):
        deg = rng.randint(1, 8)
        exps = [0] * len(names)
        for _ in range(deg):
            exps[rng.randrange(len(names))] += 1
        weight = Q.torus_weight(tuple(exps))
        inout = {v: 0 for v in Q.vertices}
        for name, e in zip(names, exps):
            tail, head = Q.arrows[name]
            inout[head] += e
            inout[tail] -= e
        if (all(w == 0 for w in weight.values())
                != all(w == 0 for w in inout.values())) or weight != inout:
            balanced_ok = False
            break
        n_checks += 1
    suites["weight_zero_balance"] = {"ok": balanced_ok, "checked": n_checks}

    f1, f2 = pi_delta_forms_symbolic(p)
    suites["pi_symbolic"] = {"ok": f1.is_zero() and f2.is_zero()}

    ok = all(s["ok"] for s in suites.values())
    status, code = _status_exit(ok, False)
    report = {
        "command": "props",
        "config": _config_echo(args, {
            "euler_samples": args.euler_samples,
            "nonunit_samples": args.nonunit_samples,
            "weight_samples": args.weight_samples,
        }),
        "suites": suites,
        "status": status,
        "elapsed_ms": int((time.monotonic() - t0) * 1000),
    }
    _emit(report, args)
    print("props: " + ", ".join(f"{k}={'ok' if v['ok'] else 'FAIL'}"
                                for k, v in suites.items()) + f" -> {status}")
    return code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="workbench",
        description="Exact verification suite for star-quiver moduli charts "
                    "and determinantal presentations.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, gamma=False, field_default="q"):
        sp.add_argument("--p", default="2,2,2", help="arm parameters a,b,c (each >= 2)")
        sp.add_argument("--field", default=field_default, help="q (rationals) or fp:Q")
        sp.add_argument("--spair-cap", type=int, default=200_000)
        sp.add_argument("--deg-cap", type=int, default=200)
        sp.add_argument("--time-cap", type=float, default=None, help="seconds")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--json", default=None, help="write the JSON report here")
        sp.add_argument("--height", type=int, default=10,
                        help="bound for random rational coordinates")
        if gamma:
            sp.add_argument("--gamma", default="zero",
                            help="zero | file:PATH | random:SEED")

    common(sub.add_parser("charts", help="fibre-chart smoothness + oracle equality"),
           gamma=True)
    common(sub.add_parser("smooth", help="total-space chart smoothness"))
    sp = sub.add_parser("cover", help="brute-force chart cover over all supports")
    common(sp)
    sp.add_argument("--enum-cap", type=int, default=24,
                    help="maximum number of arrows to enumerate over")
    common(sub.add_parser("fibre", help="empty/nonempty fibre verification"),
           gamma=True)
    sp = sub.add_parser("pi", help="deformation-map checks")
    common(sp)
    sp.add_argument("--point", default=None,
                    help="JSON file with betas/alphas to push through the map")
    common(sub.add_parser("minors", help="minors vanish under the cycle map"))
    common(sub.add_parser("kernel", help="kernel of the cycle map by elimination"),
           field_default="fp:65521")
    common(sub.add_parser("conjecture", help="kernel equals the minors ideal"),
           field_default="fp:65521")
    sp = sub.add_parser("gb", help="reduced basis of an ideal file")
    common(sp)
    sp.add_argument("--input", required=True, help="ideal text file")
    sp.add_argument("--output", default=None, help="write the basis as an ideal file")
    sp = sub.add_parser("props", help="property suites (identities, balances)")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--euler-samples", type=int, default=200)
    sp.add_argument("--nonunit-samples", type=int, default=50)
    sp.add_argument("--weight-samples", type=int, default=500)
    return ap


_COMMANDS = {
    "charts": cmd_charts,
    "smooth": cmd_smooth,
    "cover": cmd_cover,
    "fibre": cmd_fibre,
    "pi": cmd_pi,
    "minors": cmd_minors,
    "kernel": cmd_kernel,
    "conjecture": cmd_conjecture,
    "gb": cmd_gb,
    "props": cmd_props,
}


def run_command(argv) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
