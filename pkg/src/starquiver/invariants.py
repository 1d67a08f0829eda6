"""Torus-invariant cycles, the deformation map, and the determinantal kernel.

The invariant ring of the arrow space is generated by cycle monomials: the
2-cycles d<i>_j u<i>_j and the crossing cycles D_i U_j.  A polynomial ring
on symbols w1, w2, w3 and v<i>_j maps onto it; the three 2x2 minors of a
2x3 matrix in those symbols land in the kernel, and the kernel itself is
computed exactly by eliminating the arrow variables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .groebner import (
    DEFAULT_BUDGET,
    GroebnerBudget,
    Ideal,
    Inconclusive,
    eliminate,
    ideals_equal,
)
from .poly import Poly, PrimeField, QQ, VarTable, poly_prod
from .quiver import ArmParams, StarQuiver, build_star_quiver
from .reconstruction import DeformParams, canonical_relation, in_delta, make_gamma


def w_name(k: int) -> str:
    return f"w{k}"


def v_name(arm: int, j: int) -> str:
    return f"v{arm}_{j}"


def wv_table(p: ArmParams) -> VarTable:
    names = [w_name(1), w_name(2), w_name(3)]
    for arm in (1, 2, 3):
        names += [v_name(arm, j) for j in range(1, p[arm] + 1)]
    return VarTable(names)


# ---------------------------------------------------------------------------
# generating sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratingSet:
    name: str
    generators: tuple  # (label, Poly) pairs

    def labels(self) -> tuple:
        return tuple(lbl for lbl, _ in self.generators)

    def polys(self) -> tuple:
        return tuple(p for _, p in self.generators)


def crossing_cycle(Q: StarQuiver, i: int, j: int) -> Poly:
    return Q.D(i) * Q.U(j)


def generating_sets(Q: StarQuiver) -> tuple[GeneratingSet, GeneratingSet, GeneratingSet]:
    """The nested generating sets of the invariant ring: all nine crossing
    cycles, four of them, three of them — each together with all 2-cycles."""
    two = Q.two_cycles()
    crossings = {(i, j): (f"D{i}U{j}", crossing_cycle(Q, i, j))
                 for i in (1, 2, 3) for j in (1, 2, 3)}
    tier1 = [crossings[k] for k in sorted(crossings)]
    tier2 = [crossings[k] for k in ((1, 2), (1, 3), (2, 1), (2, 3))]
    tier3 = [crossings[k] for k in ((1, 2), (2, 1), (2, 3))]
    return (
        GeneratingSet("S1", tuple(two) + tuple(tier1)),
        GeneratingSet("S2", tuple(two) + tuple(tier2)),
        GeneratingSet("S3", tuple(two) + tuple(tier3)),
    )


def verify_generating_equivalence(Q: StarQuiver) -> bool:
    """The three tiers generate the same subalgebra modulo the canonical
    relation: the column identities D3 U_i - D2 U_i + D1 U_i reduce to zero,
    and each diagonal crossing cycle is a product of 2-cycles."""
    principal = Ideal(Q.table, [canonical_relation(Q)], field=Q.field)
    for i in (1, 2, 3):
        combo = crossing_cycle(Q, 3, i) - crossing_cycle(Q, 2, i) + crossing_cycle(Q, 1, i)
        if not principal.normal_form(combo).is_zero():
            return False
    for arm in (1, 2, 3):
        prod = poly_prod((Q.two_cycle(arm, j) for j in range(1, Q.p[arm] + 1)),
                         Q.table, Q.field)
        if crossing_cycle(Q, arm, arm) != prod:
            return False
    return True


# ---------------------------------------------------------------------------
# the deformation map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WVPoint:
    """A point of the invariant spectrum: three betas and one alpha per
    2-cycle coordinate."""

    betas: tuple
    alphas: tuple  # three tuples, arm i of length p_i

    def alpha(self, arm: int, j: int):
        return self.alphas[arm - 1][j - 1]

    def matches(self, p: ArmParams) -> bool:
        return tuple(len(a) for a in self.alphas) == tuple(p) and len(self.betas) == 3


def pi_map(pt: WVPoint, p: ArmParams, field=QQ) -> DeformParams:
    """Consecutive differences of the 2-cycle coordinates; lands in the
    parameter subspace identically."""
    p = ArmParams.parse(p)
    if not pt.matches(p):
        raise ValueError("point coordinates do not match arm parameters")
    al = pt.alpha
    gammas = [
        tuple(field.sub(al(arm, i), al(arm, i + 1)) for i in range(1, p[arm]))
        for arm in (1, 2, 3)
    ]
    gamma = make_gamma(
        p, gammas[0], gammas[1], gammas[2],
        a=field.sub(al(2, 1), al(1, 1)),
        b=field.sub(al(2, 1), al(3, 1)),
        A=field.sub(al(1, p.p1), al(2, p.p2)),
        B=field.sub(al(3, p.p3), al(2, p.p2)),
        field=field,
    )
    assert in_delta(gamma, field), "pi image left the parameter subspace"
    return gamma


def pi_delta_forms_symbolic(p: ArmParams) -> tuple[Poly, Poly]:
    """The two subspace forms pulled back along pi, as polynomials in
    indeterminate alphas; both telescope to zero."""
    p = ArmParams.parse(p)
    names = [f"al{arm}_{j}" for arm in (1, 2, 3) for j in range(1, p[arm] + 1)]
    table = VarTable(names)
    al = {(arm, j): Poly.var(table, QQ, f"al{arm}_{j}")
          for arm in (1, 2, 3) for j in range(1, p[arm] + 1)}
    gam = {arm: [al[arm, i] - al[arm, i + 1] for i in range(1, p[arm])]
           for arm in (1, 2, 3)}
    a = al[2, 1] - al[1, 1]
    b = al[2, 1] - al[3, 1]
    A = al[1, p.p1] - al[2, p.p2]
    B = al[3, p.p3] - al[2, p.p2]
    zero = Poly.zero(table, QQ)
    form1 = sum(gam[1], zero) - sum(gam[2], zero) + A + a
    form2 = sum(gam[3], zero) - sum(gam[2], zero) + B + b
    return form1, form2


# ---------------------------------------------------------------------------
# the homomorphism from the w/v ring
# ---------------------------------------------------------------------------

def phi_map(Q: StarQuiver) -> dict:
    """Images of the w/v symbols: w1 -> D1 U2, w2 -> D2 U1, w3 -> -D2 U3,
    v<i>_j -> d<i>_j u<i>_j."""
    images = {
        w_name(1): crossing_cycle(Q, 1, 2),
        w_name(2): crossing_cycle(Q, 2, 1),
        w_name(3): -crossing_cycle(Q, 2, 3),
    }
    for arm in (1, 2, 3):
        for j in range(1, Q.p[arm] + 1):
            images[v_name(arm, j)] = Q.two_cycle(arm, j)
    return images


def apply_phi(poly: Poly, Q: StarQuiver) -> Poly:
    """Extend phi to any polynomial in the w/v ring by substitution."""
    images = phi_map(Q)
    field = Q.field
    result = Poly.zero(Q.table, field)
    powers: dict = {}
    names = poly.table.names
    for exps, c in poly.terms.items():
        term = Poly.const(Q.table, field, c)
        for i, e in enumerate(exps):
            if not e:
                continue
            key = (names[i], e)
            pw = powers.get(key)
            if pw is None:
                pw = images[names[i]] ** e
                powers[key] = pw
            term = term * pw
        result = result + term
    return result


# ---------------------------------------------------------------------------
# determinantal matrix and minors
# ---------------------------------------------------------------------------

def det_matrix(p: ArmParams, field=QQ) -> tuple:
    """The 2x3 matrix (w2, w3, V2; V1, w3 + V3, w1) with V_i the full
    2-cycle product of arm i."""
    p = ArmParams.parse(p)
    table = wv_table(p)
    V = {arm: poly_prod((Poly.var(table, field, v_name(arm, j))
                         for j in range(1, p[arm] + 1)), table, field)
         for arm in (1, 2, 3)}
    w = {k: Poly.var(table, field, w_name(k)) for k in (1, 2, 3)}
    row_a = (w[2], w[3], V[2])
    row_b = (V[1], w[3] + V[3], w[1])
    return row_a, row_b


def determinantal_minors(p: ArmParams, field=QQ) -> tuple:
    """All 2x2 minors, oriented a_i b_j - b_i a_j for columns i < j."""
    row_a, row_b = det_matrix(p, field)
    out = []
    for i in range(3):
        for j in range(i + 1, 3):
            out.append(row_a[i] * row_b[j] - row_b[i] * row_a[j])
    return tuple(out)


def verify_minors_vanish(p, field=QQ) -> bool:
    """Each minor maps to zero under phi modulo the canonical relation."""
    p = ArmParams.parse(p)
    Q = build_star_quiver(p, field)
    principal = Ideal(Q.table, [canonical_relation(Q)], field=field)
    for m in determinantal_minors(p, field):
        if not principal.normal_form(apply_phi(m, Q)).is_zero():
            return False
    return True


def minors_ideal(p: ArmParams, field=QQ,
                 budget: GroebnerBudget = DEFAULT_BUDGET) -> Ideal:
    p = ArmParams.parse(p)
    return Ideal(wv_table(p), determinantal_minors(p, field), field=field, budget=budget)


# ---------------------------------------------------------------------------
# the kernel and the conjecture
# ---------------------------------------------------------------------------

def kernel_ideal(p, field=None, budget: GroebnerBudget | None = None) -> Ideal:
    """ker(phi), by eliminating the arrow variables from the graph ideal.

    The joint ring holds arrows and w/v symbols; the ideal is the canonical
    relation plus one tag relation per symbol.  Defaults to the probabilistic
    prime-field mode; pass QQ for the exact pass.
    """
    p = ArmParams.parse(p)
    if field is None:
        field = PrimeField(65521)
    if budget is None:
        budget = GroebnerBudget(max_spairs=2_000_000, max_degree=120, time_cap=870.0)
    Q = build_star_quiver(p, field)
    wv = wv_table(p)
    joint = VarTable(tuple(Q.table.names) + tuple(wv.names))
    gens = [canonical_relation(Q).rename(joint)]
    for sym, image in phi_map(Q).items():
        gens.append(Poly.var(joint, field, sym) - image.rename(joint))
    ideal = Ideal(joint, gens, field=field, budget=budget)
    result = eliminate(ideal, Q.table.names, budget=budget)
    assert result.table == wv  # the kept block is exactly the w/v table
    return result


@dataclass(frozen=True)
class ConjectureReport:
    p: ArmParams
    field_name: str
    probabilistic: bool
    minors_in_kernel: bool
    equal: bool | None
    status: str  # confirmed | refuted | inconclusive
    elapsed_ms: int
    kernel_generators: tuple
    minors: tuple


def verify_conjecture(p, field=None, budget: GroebnerBudget | None = None) -> ConjectureReport:
    """Compare ker(phi) with the minors ideal.

    The containment minors-inside-kernel is asserted independently and must
    always hold (exact, over the rationals).  Equality over a prime field is
    reported as a probabilistic confirmation.
    """
    p = ArmParams.parse(p)
    if field is None:
        field = PrimeField(65521)
    t0 = time.monotonic()
    minors_ok = verify_minors_vanish(p, QQ)
    try:
        kern = kernel_ideal(p, field, budget)
        mins = minors_ideal(p, field)
        equal = ideals_equal(kern, mins)
        status = "confirmed" if (equal and minors_ok) else "refuted"
        kgens = tuple(g.to_str() for g in kern.groebner_basis())
    except Inconclusive:
        equal = None
        status = "inconclusive"
        kgens = ()
    elapsed = int((time.monotonic() - t0) * 1000)
    return ConjectureReport(
        p=p,
        field_name=getattr(field, "name", "QQ"),
        probabilistic=isinstance(field, PrimeField),
        minors_in_kernel=minors_ok,
        equal=equal,
        status=status,
        elapsed_ms=elapsed,
        kernel_generators=kgens,
        minors=tuple(m.to_str() for m in determinantal_minors(p, field)),
    )


# ---------------------------------------------------------------------------
# the fibre over the origin
# ---------------------------------------------------------------------------

def origin_fibre_table() -> VarTable:
    return VarTable(["w1", "w2", "w3", "v"])


def origin_fibre_minors(p: ArmParams, field=QQ) -> tuple:
    """2x2 minors of (w2, w3, v^p2; v^p1, w3 + v^p3, w1)."""
    p = ArmParams.parse(p)
    table = origin_fibre_table()
    w = {k: Poly.var(table, field, w_name(k)) for k in (1, 2, 3)}
    v = Poly.var(table, field, "v")
    row_a = (w[2], w[3], v ** p.p2)
    row_b = (v ** p.p1, w[3] + v ** p.p3, w[1])
    out = []
    for i in range(3):
        for j in range(i + 1, 3):
            out.append(row_a[i] * row_b[j] - row_b[i] * row_a[j])
    return tuple(out)


@dataclass(frozen=True)
class OriginFibreReport:
    p: ArmParams
    field_name: str
    equal: bool | None
    status: str  # confirmed | refuted | inconclusive
    specialized_generators: tuple
    target_minors: tuple


def fibre_zero_presentation(p, field=None, budget: GroebnerBudget | None = None,
                            kernel: Ideal | None = None) -> OriginFibreReport:
    """Specialize the kernel by sending every v<i>_j to a single v and compare
    with the minors of the one-variable matrix.  Conditional on the kernel
    computation (inconclusive if it times out)."""
    p = ArmParams.parse(p)
    if field is None:
        field = PrimeField(65521)
    table = origin_fibre_table()
    targets = origin_fibre_minors(p, field)
    try:
        kern = kernel if kernel is not None else kernel_ideal(p, field, budget)
        mapping = {v_name(arm, j): "v" for arm in (1, 2, 3)
                   for j in range(1, p[arm] + 1)}
        specialized = [g.rename(table, mapping) for g in kern.groebner_basis()]
        spec_ideal = Ideal(table, specialized, field=field,
                           budget=budget or DEFAULT_BUDGET)
        target_ideal = Ideal(table, targets, field=field,
                             budget=budget or DEFAULT_BUDGET)
        equal = ideals_equal(spec_ideal, target_ideal)
        status = "confirmed" if equal else "refuted"
    except Inconclusive:
        return OriginFibreReport(p, getattr(field, "name", "QQ"), None,
                                 "inconclusive", (), tuple(t.to_str() for t in targets))
    return OriginFibreReport(
        p, getattr(field, "name", "QQ"), equal, status,
        tuple(g.to_str() for g in specialized),
        tuple(t.to_str() for t in targets),
    )
