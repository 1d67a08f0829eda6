"""Chart presentations of the moduli space and their smoothness certificates.

Each chart scales the full downward path of one arm, plus partial down/up
paths on the other two arms, to 1.  The total space (one canonical relation)
gets a hypersurface presentation; every fibre of the deformation family gets
a two-relation presentation in four variables.  A second, substitution-based
derivation of the fibre presentation acts as an independent oracle: it solves
the arm chains mechanically from the relation system and must generate the
same ideal as the closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groebner import (
    DEFAULT_BUDGET,
    DimensionReport,
    GroebnerBudget,
    Ideal,
    Inconclusive,
    contains_one,
    ideals_equal,
    krull_dimension,
)
from .poly import Poly, QQ, VarTable, poly_prod
from .quiver import (
    ArmParams,
    ChartId,
    StarQuiver,
    all_chart_ids,
    build_star_quiver,
    chart_unit_arrows,
    d_arrow,
    u_arrow,
)
from .reconstruction import DeformParams, canonical_relation, deformed_relations, in_delta


@dataclass(frozen=True)
class ChartPresentation:
    """A chart's variables, defining relations and arrow substitutions.

    The substitution dictionary expresses every arrow of the quiver as a
    polynomial in the chart variables; pushing the full relation system
    through it lands inside the ideal of `relations`.
    """

    chart: ChartId
    table: VarTable
    relations: tuple
    substitution: dict
    p: ArmParams
    gamma: DeformParams | None

    def ideal(self, budget: GroebnerBudget = DEFAULT_BUDGET) -> Ideal:
        field = self.relations[0].field if self.relations else QQ
        return Ideal(self.table, self.relations, field=field, budget=budget)


def _check_chart_range(c: ChartId, p: ArmParams):
    arm_a, arm_b = c.other_arms()
    if c.k not in (1, 2, 3) or not (1 <= c.i <= p[arm_a]) or not (1 <= c.j <= p[arm_b]):
        raise ValueError(f"chart {c} out of range for p={p.label()}")


# ---------------------------------------------------------------------------
# total-space charts (one relation)
# ---------------------------------------------------------------------------

def total_space_chart(p: ArmParams, c: ChartId, field=QQ) -> ChartPresentation:
    """Hypersurface presentation of the chart of the one-relation moduli."""
    p = ArmParams.parse(p)
    _check_chart_range(c, p)
    arm_a, arm_b = c.other_arms()
    names = [u_arrow(c.k, m) for m in range(1, p[c.k] + 1)]
    names += [u_arrow(arm_a, m) for m in range(1, c.i + 1)]
    names += [d_arrow(arm_a, m) for m in range(c.i, p[arm_a] + 1)]
    names += [u_arrow(arm_b, m) for m in range(1, c.j + 1)]
    names += [d_arrow(arm_b, m) for m in range(c.j, p[arm_b] + 1)]
    table = VarTable(names)
    prod_a = poly_prod(
        (Poly.var(table, field, d_arrow(arm_a, m)) for m in range(c.i, p[arm_a] + 1)),
        table, field)
    prod_b = poly_prod(
        (Poly.var(table, field, d_arrow(arm_b, m)) for m in range(c.j, p[arm_b] + 1)),
        table, field)
    one = Poly.const(table, field, 1)
    # canonical sign pattern D1 - D2 + D3 with D_k scaled to 1
    if c.k == 1:
        rel = one - prod_a + prod_b
    elif c.k == 2:
        rel = prod_a - one + prod_b
    else:
        rel = prod_a - prod_b + one
    subs = {}
    for arrow in chart_unit_arrows(c, p):
        subs[arrow] = one
    for name in names:
        subs[name] = Poly.var(table, field, name)
    return ChartPresentation(c, table, (rel,), subs, p, None)


# ---------------------------------------------------------------------------
# fibre charts (two relations in four variables)
# ---------------------------------------------------------------------------

def _chart_table(c: ChartId) -> VarTable:
    arm_a, arm_b = c.other_arms()
    return VarTable([
        d_arrow(arm_a, c.i), u_arrow(arm_a, c.i),
        d_arrow(arm_b, c.j), u_arrow(arm_b, c.j),
    ])


def _arm_cycle_product(cycle: Poly, d_var: Poly, gammas, m: int, p_arm: int, field):
    """d * prod_{t=m}^{p-1} (cycle - sum_{l=m}^{t} gamma_l); empty product = 1."""
    table = d_var.table
    acc = d_var
    partial = field.zero
    for t in range(m, p_arm):
        partial = field.add(partial, gammas[t - 1])
        acc = acc * (cycle - Poly.const(table, field, partial))
    return acc


def fibre_chart(p: ArmParams, gamma: DeformParams, c: ChartId, field=QQ) -> ChartPresentation:
    """Closed-form presentation of the chart of the fibre at gamma."""
    p = ArmParams.parse(p)
    _check_chart_range(c, p)
    if not gamma.matches(p):
        raise ValueError("gamma component lengths do not match arm parameters")
    if not in_delta(gamma, field):
        raise ValueError("gamma outside the parameter subspace: empty fibre")
    arm_a, arm_b = c.other_arms()
    table = _chart_table(c)
    da = Poly.var(table, field, d_arrow(arm_a, c.i))
    ua = Poly.var(table, field, u_arrow(arm_a, c.i))
    db = Poly.var(table, field, d_arrow(arm_b, c.j))
    ub = Poly.var(table, field, u_arrow(arm_b, c.j))
    cyc_a, cyc_b = da * ua, db * ub
    ga, gb = gamma.gamma(arm_a), gamma.gamma(arm_b)
    pref_a = sum(ga[: c.i - 1], field.zero)
    pref_b = sum(gb[: c.j - 1], field.zero)

    if c.k == 1:
        const = gamma.b
        f1 = cyc_a + pref_a - cyc_b - pref_b - Poly.const(table, field, const)
    elif c.k == 2:
        const = field.sub(gamma.b, gamma.a)
        f1 = cyc_a + pref_a - cyc_b - pref_b - Poly.const(table, field, const)
    else:
        f1 = cyc_b + pref_b - cyc_a - pref_a - Poly.const(table, field, gamma.a)

    Fa = _arm_cycle_product(cyc_a, da, ga, c.i, p[arm_a], field)
    Fb = _arm_cycle_product(cyc_b, db, gb, c.j, p[arm_b], field)
    one = Poly.const(table, field, 1)
    if c.k == 1:
        f2 = one - Fa + Fb
    elif c.k == 2:
        f2 = Fa - one + Fb
    else:
        f2 = Fa - Fb + one

    subs = _fibre_substitution(p, gamma, c, table, field)
    return ChartPresentation(c, table, (f1, f2), subs, p, gamma)


def _fibre_substitution(p: ArmParams, gamma: DeformParams, c: ChartId,
                        table: VarTable, field) -> dict:
    """Arrow expressions in chart variables, transcribed from the chain solve."""
    arm_a, arm_b = c.other_arms()
    one = Poly.const(table, field, 1)
    subs = {}

    def const(v):
        return Poly.const(table, field, v)

    def solved_arm(arm: int, idx: int):
        g = gamma.gamma(arm)
        d_idx = Poly.var(table, field, d_arrow(arm, idx))
        u_idx = Poly.var(table, field, u_arrow(arm, idx))
        cyc = d_idx * u_idx
        for m in range(1, idx):
            subs[d_arrow(arm, m)] = one
            subs[u_arrow(arm, m)] = cyc + const(sum(g[m - 1: idx - 1], field.zero))
        subs[d_arrow(arm, idx)] = d_idx
        subs[u_arrow(arm, idx)] = u_idx
        for m in range(idx + 1, p[arm] + 1):
            subs[u_arrow(arm, m)] = one
            subs[d_arrow(arm, m)] = cyc - const(sum(g[idx - 1: m - 1], field.zero))
        return cyc

    cyc_a = solved_arm(arm_a, c.i)
    cyc_b = solved_arm(arm_b, c.j)
    ga, gb = gamma.gamma(arm_a), gamma.gamma(arm_b)
    pref_a = sum(ga[: c.i - 1], field.zero)
    pref_b = sum(gb[: c.j - 1], field.zero)
    # base of the distinguished arm's u-chain, solved from relation (a) or (b)
    if c.k == 1:
        base = cyc_a + const(field.sub(pref_a, gamma.a))
    elif c.k == 2:
        base = cyc_a + const(field.add(pref_a, gamma.a))
    else:
        base = cyc_b + const(field.sub(pref_b, gamma.b))
    gk = gamma.gamma(c.k)
    for m in range(1, p[c.k] + 1):
        subs[d_arrow(c.k, m)] = one
        subs[u_arrow(c.k, m)] = base - const(sum(gk[: m - 1], field.zero))
    return subs


# ---------------------------------------------------------------------------
# substitution-derived oracle
# ---------------------------------------------------------------------------

def _solve_linear(img: Poly, name: str) -> Poly:
    """Solve img = 0 for `name`: requires a single linear occurrence with a
    constant coefficient."""
    idx = img.table.index(name)
    coeff = None
    rest = {}
    for exps, cval in img.terms.items():
        if exps[idx] == 0:
            rest[exps] = cval
            continue
        if exps[idx] != 1 or any(e for k, e in enumerate(exps) if k != idx and e):
            raise ValueError(f"relation not linear in {name}")
        if coeff is not None:
            raise ValueError(f"multiple occurrences of {name}")
        coeff = cval
    if coeff is None:
        raise ValueError(f"{name} does not occur")
    field = img.field
    inv = field.inv(coeff)
    return Poly(img.table, field, {e: field.neg(field.mul(inv, v)) for e, v in rest.items()})


def chart_by_substitution(Q: StarQuiver, gamma: DeformParams | None,
                          c: ChartId) -> ChartPresentation:
    """Derive the chart presentation directly from the relation system.

    Sets the chart's unit arrows to 1, solves the three arm chains by
    forward/backward substitution, pushes the remaining relations through,
    solves the leftover linear variable, and returns the nonzero survivors.
    Must generate the same ideal as the closed form (checked elsewhere via
    ideal equality).
    """
    p = Q.p
    _check_chart_range(c, p)
    field = Q.field
    if gamma is None:
        # total-space mode: only the canonical relation exists
        pres = total_space_chart(p, c, field)
        img = canonical_relation(Q).substitute(
            {a: e.rename(Q.table) for a, e in pres.substitution.items()})
        return ChartPresentation(c, pres.table, (img.rename(pres.table),),
                                 pres.substitution, p, None)

    if not in_delta(gamma, field):
        raise ValueError("gamma outside the parameter subspace: empty fibre")
    rels = deformed_relations(Q, gamma)
    arm_a, arm_b = c.other_arms()
    one = Poly.const(Q.table, field, 1)
    B: dict[str, Poly] = {a: one for a in chart_unit_arrows(c, p)}

    def solve_from(label: str, unknown: str):
        img = rels.by_label(label).substitute(B)
        B[unknown] = _solve_linear(img, unknown)

    # distinguished arm: all d's are units, the u-chain hangs off u_{k,1}
    for m in range(1, p[c.k]):
        solve_from(f"({c.k}).{m}", u_arrow(c.k, m + 1))
    # other arms: express everything in the chart pair at index i (resp. j)
    for arm, idx in ((arm_a, c.i), (arm_b, c.j)):
        for m in range(idx - 1, 0, -1):
            solve_from(f"({arm}).{m}", u_arrow(arm, m))
        for m in range(idx, p[arm]):
            solve_from(f"({arm}).{m}", d_arrow(arm, m + 1))

    # the arm chains are now satisfied identically
    for arm in (1, 2, 3):
        for m in range(1, p[arm]):
            residue = rels.by_label(f"({arm}).{m}").substitute(B)
            if not residue.is_zero():
                raise AssertionError(f"chain relation ({arm}).{m} did not resolve")

    leftover = u_arrow(c.k, 1)
    images = {lbl: rels.by_label(lbl).substitute(B) for lbl in ("(a)", "(b)", "(c)", "(d)", "(x)")}
    solved_label = None
    for lbl in ("(a)", "(b)", "(c)", "(d)"):
        if leftover in images[lbl].variables_used():
            solved_label = lbl
            break
    if solved_label is None:
        raise AssertionError("no relation available to solve the leftover variable")
    sol = _solve_linear(images[solved_label], leftover)
    B = {a: e.substitute({leftover: sol}) for a, e in B.items()}
    B[leftover] = sol
    for arm, idx in ((arm_a, c.i), (arm_b, c.j)):
        B[d_arrow(arm, idx)] = Poly.var(Q.table, field, d_arrow(arm, idx))
        B[u_arrow(arm, idx)] = Poly.var(Q.table, field, u_arrow(arm, idx))

    table = _chart_table(c)
    survivors = []
    for lbl in ("(a)", "(b)", "(c)", "(d)", "(x)"):
        if lbl == solved_label:
            continue
        img = images[lbl].substitute({leftover: sol})
        if not img.is_zero():
            survivors.append(img.rename(table))
    subs = {a: e.rename(table) for a, e in B.items()}
    return ChartPresentation(c, table, tuple(survivors), subs, p, gamma)


# ---------------------------------------------------------------------------
# smoothness certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessCertificate:
    chart: ChartId | None
    jacobian_generators: tuple
    one_in_jacobian: bool | None
    dimension: DimensionReport | None
    status: str  # smooth | singular | inconclusive


def _determinant(rows):
    if len(rows) == 1:
        return rows[0][0]
    total = None
    for k, pivot in enumerate(rows[0]):
        minor = [[r[c] for c in range(len(rows)) if c != k] for r in rows[1:]]
        term = pivot * _determinant(minor)
        if k % 2:
            term = -term
        total = term if total is None else total + term
    return total


def jacobian_ideal_generators(pres: ChartPresentation) -> tuple:
    """Relations plus all maximal minors of their Jacobian matrix.

    One relation: all partial derivatives.  Two relations in n variables:
    all two-by-two minors (six of them for n = 4).
    """
    rels = pres.relations
    names = pres.table.names
    jac = [[f.derivative(v) for v in names] for f in rels]
    r = len(rels)
    minors = []
    for cols in itertools.combinations(range(len(names)), r):
        minors.append(_determinant([[jac[a][b] for b in cols] for a in range(r)]))
    return tuple(rels) + tuple(minors)


def smoothness_certificate(pres: ChartPresentation,
                           expected_dim: int | None = None,
                           budget: GroebnerBudget = DEFAULT_BUDGET) -> SmoothnessCertificate:
    """Jacobian smoothness check, optionally pinned to a dimension target."""
    field = pres.relations[0].field if pres.relations else QQ
    jac_gens = jacobian_ideal_generators(pres)
    try:
        jac_ideal = Ideal(pres.table, jac_gens, field=field, budget=budget)
        one_in = contains_one(jac_ideal)
        dim = krull_dimension(pres.ideal(budget))
    except Inconclusive:
        return SmoothnessCertificate(pres.chart, jac_gens, None, None, "inconclusive")
    smooth = one_in and (expected_dim is None or dim.dimension == expected_dim)
    status = "smooth" if smooth else "singular"
    return SmoothnessCertificate(pres.chart, jac_gens, one_in, dim, status)


def certify_presentation(table: VarTable, relations, expected_dim=None,
                         budget: GroebnerBudget = DEFAULT_BUDGET) -> SmoothnessCertificate:
    """Certificate for a bare presentation (used for control examples)."""
    pres = ChartPresentation(None, table, tuple(relations), {}, None, None)
    return smoothness_certificate(pres, expected_dim, budget)


def oracle_matches(Q: StarQuiver, pres: ChartPresentation,
                   budget: GroebnerBudget = DEFAULT_BUDGET) -> bool:
    """Ideal equality of the closed-form and substitution-derived presentations."""
    derived = chart_by_substitution(Q, pres.gamma, pres.chart)
    return ideals_equal(pres.ideal(budget), derived.ideal(budget))


def fibre_witness_point(p: ArmParams, gamma: DeformParams, field=QQ) -> dict:
    """An exact scalar point of the fibre at gamma, read off a boundary chart.

    On the chart with both indices maximal the second relation is linear, so
    a rational solution exists; pushing it through the substitution
    dictionary gives values for every arrow.
    """
    p = ArmParams.parse(p)
    c = ChartId(1, p.p2, p.p3)
    pres = fibre_chart(p, gamma, c, field)
    arm_a, arm_b = c.other_arms()
    ga, gb = gamma.gamma(arm_a), gamma.gamma(arm_b)
    pref_a = sum(ga[: c.i - 1], field.zero)
    pref_b = sum(gb[: c.j - 1], field.zero)
    # with d_a = 1 and d_b = 0: f2 = 1 - d_a + d_b = 0 and f1 solves u_a
    point = {
        d_arrow(arm_a, c.i): field.one,
        u_arrow(arm_a, c.i): field.sub(field.add(gamma.b, pref_b), pref_a),
        d_arrow(arm_b, c.j): field.zero,
        u_arrow(arm_b, c.j): field.zero,
    }
    for rel in pres.relations:
        assert rel.evaluate(point) == field.zero, "witness point misses the chart"
    return {arrow: expr.evaluate(point) for arrow, expr in pres.substitution.items()}


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------

def euler_identity_check(n: int, alphas, field=QQ) -> bool:
    """For f = x*(xy - a_1)...(xy - a_n): check x f_x - y f_y = f exactly."""
    alphas = [field.coerce(v) for v in alphas]
    if len(alphas) != n:
        raise ValueError("expected one scalar per factor")
    table = VarTable(["x", "y"])
    x = Poly.var(table, field, "x")
    y = Poly.var(table, field, "y")
    xy = x * y
    f = x
    for a in alphas:
        f = f * (xy - Poly.const(table, field, a))
    return x * f.derivative("x") - y * f.derivative("y") == f


def quotient_nonzero_check(alphas, betas, field=QQ,
                           budget: GroebnerBudget = DEFAULT_BUDGET) -> bool:
    """Nonvanishing of C[a,b,x,y]/(f1, f2) for the two chart-shaped relations.

    alphas = (a_1, ..., a_n) with a_1 the constant of f1; betas =
    (b_2, ..., b_m).  Returns True iff 1 is not in the ideal.
    """
    alphas = [field.coerce(v) for v in alphas]
    betas = [field.coerce(v) for v in betas]
    if not alphas:
        raise ValueError("need at least the constant alpha_1")
    table = VarTable(["a", "b", "x", "y"])
    a = Poly.var(table, field, "a")
    b = Poly.var(table, field, "b")
    x = Poly.var(table, field, "x")
    y = Poly.var(table, field, "y")
    f1 = a * b - x * y + Poly.const(table, field, alphas[0])
    prod_a = a
    for v in alphas[1:]:
        prod_a = prod_a * (a * b - Poly.const(table, field, v))
    prod_x = x
    for v in betas:
        prod_x = prod_x * (x * y - Poly.const(table, field, v))
    f2 = Poly.const(table, field, 1) - prod_a + prod_x
    return not contains_one(Ideal(table, [f1, f2], field=field, budget=budget))


# ---------------------------------------------------------------------------
# brute-force cover check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverReport:
    p: ArmParams
    total_supports: int
    stable_supports: int
    checked_supports: int
    covered_supports: int
    counterexamples: tuple

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_cover(p, enumeration_cap: int = 24, field=QQ) -> CoverReport:
    """Enumerate all arrow supports; every stable, relation-compatible one
    must satisfy the conditions of at least one chart."""
    p = ArmParams.parse(p)
    Q = build_star_quiver(p, field)
    names = Q.table.names
    n = len(names)
    if n > enumeration_cap:
        raise ValueError(
            f"{n} arrows exceed the enumeration cap {enumeration_cap}")
    idx = {name: i for i, name in enumerate(names)}
    vpos = {v: i for i, v in enumerate(Q.vertices)}
    edges = [(idx[a], vpos[t], vpos[h]) for a, (t, h) in Q.arrows.items()]
    chart_masks = []
    for c in all_chart_ids(p):
        mask = 0
        for arrow in chart_unit_arrows(c, p):
            mask |= 1 << idx[arrow]
        chart_masks.append(mask)
    arm_masks = []
    for arm in (1, 2, 3):
        mask = 0
        for j in range(1, p[arm] + 1):
            mask |= 1 << idx[d_arrow(arm, j)]
        arm_masks.append(mask)
    nv = len(Q.vertices)
    all_vertices = (1 << nv) - 1
    start = 1 << vpos["ext"]

    stable = checked = covered = 0
    counterexamples = []
    for bits in range(1 << n):
        live = [(t, h) for a, t, h in edges if bits >> a & 1]
        reached = start
        changed = True
        while changed:
            changed = False
            for t, h in live:
                if reached >> t & 1 and not reached >> h & 1:
                    reached |= 1 << h
                    changed = True
        if reached != all_vertices:
            continue
        stable += 1
        full = sum(1 for m in arm_masks if bits & m == m)
        if not (full >= 2 or full == 0):
            continue
        checked += 1
        if any(bits & m == m for m in chart_masks):
            covered += 1
        elif len(counterexamples) < 16:
            counterexamples.append(tuple(names[i] for i in range(n) if bits >> i & 1))
    return CoverReport(p, 1 << n, stable, checked, covered, tuple(counterexamples))
