"""Deformed relation systems of the star quiver and the parameter space.

A deformation parameter packs three vectors (one per arm, length p_i - 1)
and four scalars a, b, A, B, accessed by name throughout.  The parameter
space of interest is the affine subspace cut out by two linear trace-type
conditions; off it the scalar representation variety is empty, which the
representation ideal certifies by containing 1.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .groebner import GroebnerBudget, DEFAULT_BUDGET, Ideal
from .poly import Poly, QQ
from .quiver import ArmParams, StarQuiver, d_arrow, u_arrow


@dataclass(frozen=True)
class DeformParams:
    """gamma = (gamma1, gamma2, gamma3, a, b, A, B), all exact field elements."""

    gamma1: tuple
    gamma2: tuple
    gamma3: tuple
    a: object
    b: object
    A: object
    B: object

    def gamma(self, arm: int) -> tuple:
        return (self.gamma1, self.gamma2, self.gamma3)[arm - 1]

    def coordinate_count(self) -> int:
        return len(self.gamma1) + len(self.gamma2) + len(self.gamma3) + 4

    def matches(self, p: ArmParams) -> bool:
        return tuple(len(self.gamma(i)) for i in (1, 2, 3)) == (p.p1 - 1, p.p2 - 1, p.p3 - 1)

    def is_zero(self) -> bool:
        vals = list(self.gamma1) + list(self.gamma2) + list(self.gamma3)
        vals += [self.a, self.b, self.A, self.B]
        return all(v == 0 for v in vals)

    def to_json(self) -> dict:
        def enc(v):
            return str(v)

        return {
            "gamma1": [enc(v) for v in self.gamma1],
            "gamma2": [enc(v) for v in self.gamma2],
            "gamma3": [enc(v) for v in self.gamma3],
            "a": enc(self.a),
            "b": enc(self.b),
            "A": enc(self.A),
            "B": enc(self.B),
        }


def zero_gamma(p: ArmParams, field=QQ) -> DeformParams:
    z = field.zero
    return DeformParams(
        gamma1=(z,) * (p.p1 - 1),
        gamma2=(z,) * (p.p2 - 1),
        gamma3=(z,) * (p.p3 - 1),
        a=z, b=z, A=z, B=z,
    )


def make_gamma(p: ArmParams, gamma1, gamma2, gamma3, a, b, A, B, field=QQ) -> DeformParams:
    g = DeformParams(
        gamma1=tuple(field.coerce(v) for v in gamma1),
        gamma2=tuple(field.coerce(v) for v in gamma2),
        gamma3=tuple(field.coerce(v) for v in gamma3),
        a=field.coerce(a), b=field.coerce(b),
        A=field.coerce(A), B=field.coerce(B),
    )
    if not g.matches(p):
        raise ValueError("gamma component lengths do not match arm parameters")
    return g


# ---------------------------------------------------------------------------
# the parameter subspace
# ---------------------------------------------------------------------------

def delta_forms(gamma: DeformParams, field=QQ) -> tuple:
    """The two defining linear forms, evaluated exactly."""
    s1 = sum(gamma.gamma1, field.zero)
    s2 = sum(gamma.gamma2, field.zero)
    s3 = sum(gamma.gamma3, field.zero)
    return (s1 - s2 + gamma.A + gamma.a, s3 - s2 + gamma.B + gamma.b)


def in_delta(gamma: DeformParams, field=QQ) -> bool:
    """Membership in the parameter subspace; when true the derived third
    identity (difference of the two forms) is asserted as a consequence."""
    f1, f2 = delta_forms(gamma, field)
    ok = f1 == field.zero and f2 == field.zero
    if ok:
        s1 = sum(gamma.gamma1, field.zero)
        s3 = sum(gamma.gamma3, field.zero)
        third = s1 - s3 + (gamma.A - gamma.B) + (gamma.a - gamma.b)
        assert third == field.zero, "derived identity violated; Delta forms inconsistent"
    return ok


# ---------------------------------------------------------------------------
# relation systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationSystem:
    """Labelled relations: the three arm chains, (a)-(d), and the canonical (x)."""

    labels: tuple
    polys: tuple

    def __iter__(self):
        return iter(zip(self.labels, self.polys))

    def __len__(self):
        return len(self.polys)

    def by_label(self, label: str) -> Poly:
        return self.polys[self.labels.index(label)]


def canonical_relation(Q: StarQuiver) -> Poly:
    """D1 - D2 + D3 on the full downward paths."""
    return Q.D(1) - Q.D(2) + Q.D(3)


def deformed_relations(Q: StarQuiver, gamma: DeformParams) -> RelationSystem:
    """The deformed relation system at the scalar dimension vector.

    Arm chains: u<i>_k d<i>_k - d<i>_{k+1} u<i>_{k+1} = gamma_{ik}; the four
    scalar relations tie the arm tops and bottoms together; the canonical
    relation stays undeformed.
    """
    if not gamma.matches(Q.p):
        raise ValueError("gamma component lengths do not match quiver arms")
    field = Q.field
    av = Q.arrow_poly
    labels = []
    polys = []
    for arm in (1, 2, 3):
        g = gamma.gamma(arm)
        for k in range(1, Q.p[arm]):
            labels.append(f"({arm}).{k}")
            polys.append(
                av(u_arrow(arm, k)) * av(d_arrow(arm, k))
                - av(d_arrow(arm, k + 1)) * av(u_arrow(arm, k + 1))
                - Poly.const(Q.table, field, g[k - 1])
            )
    labels.append("(a)")
    polys.append(av(d_arrow(2, 1)) * av(u_arrow(2, 1))
                 - av(d_arrow(1, 1)) * av(u_arrow(1, 1))
                 - Poly.const(Q.table, field, gamma.a))
    labels.append("(b)")
    polys.append(av(d_arrow(2, 1)) * av(u_arrow(2, 1))
                 - av(d_arrow(3, 1)) * av(u_arrow(3, 1))
                 - Poly.const(Q.table, field, gamma.b))
    labels.append("(c)")
    polys.append(av(u_arrow(1, Q.p.p1)) * av(d_arrow(1, Q.p.p1))
                 - av(u_arrow(2, Q.p.p2)) * av(d_arrow(2, Q.p.p2))
                 - Poly.const(Q.table, field, gamma.A))
    labels.append("(d)")
    polys.append(av(u_arrow(3, Q.p.p3)) * av(d_arrow(3, Q.p.p3))
                 - av(u_arrow(2, Q.p.p2)) * av(d_arrow(2, Q.p.p2))
                 - Poly.const(Q.table, field, gamma.B))
    labels.append("(x)")
    polys.append(canonical_relation(Q))
    return RelationSystem(tuple(labels), tuple(polys))


def rep_ideal(Q: StarQuiver, gamma: DeformParams,
              budget: GroebnerBudget = DEFAULT_BUDGET) -> Ideal:
    """Vanishing ideal of the relation system in the arrow variables."""
    rels = deformed_relations(Q, gamma)
    return Ideal(Q.table, rels.polys, field=Q.field, budget=budget)


# ---------------------------------------------------------------------------
# gamma input: JSON, zero, seeded random
# ---------------------------------------------------------------------------

def _random_fraction(rng: random.Random, height: int) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_gamma(p: ArmParams, seed: int, height: int = 10, field=QQ,
                 inside_delta: bool = True) -> DeformParams:
    """Seeded random parameter of bounded height.

    Inside the subspace: all coordinates free except a and b, which are
    solved from the two defining equations.  Outside: fully free, resampled
    on the rare draw that lands inside.
    """
    rng = random.Random(f"gamma:{seed}:{p.label()}:{height}:{inside_delta}")
    while True:
        g1 = tuple(_random_fraction(rng, height) for _ in range(p.p1 - 1))
        g2 = tuple(_random_fraction(rng, height) for _ in range(p.p2 - 1))
        g3 = tuple(_random_fraction(rng, height) for _ in range(p.p3 - 1))
        A = _random_fraction(rng, height)
        B = _random_fraction(rng, height)
        if inside_delta:
            a = sum(g2, Fraction(0)) - sum(g1, Fraction(0)) - A
            b = sum(g2, Fraction(0)) - sum(g3, Fraction(0)) - B
        else:
            a = _random_fraction(rng, height)
            b = _random_fraction(rng, height)
        gamma = make_gamma(p, g1, g2, g3, a, b, A, B, field=field)
        if in_delta(gamma, field) == inside_delta:
            return gamma


def gamma_from_json(obj, p: ArmParams, field=QQ) -> DeformParams:
    """Decode a gamma JSON object (rationals as 'n/d' strings or ints);
    the string specifiers 'zero' and 'random(seed)' are also accepted."""
    if isinstance(obj, str):
        spec = obj.strip()
        if spec == "zero":
            return zero_gamma(p, field)
        if spec.startswith("random(") and spec.endswith(")"):
            return random_gamma(p, int(spec[len("random("):-1]), field=field)
        raise ValueError(f"unknown gamma specifier {spec!r}")
    missing = [k for k in ("gamma1", "gamma2", "gamma3", "a", "b", "A", "B") if k not in obj]
    if missing:
        raise ValueError(f"gamma JSON missing keys {missing}")
    return make_gamma(
        p,
        [Fraction(str(v)) for v in obj["gamma1"]],
        [Fraction(str(v)) for v in obj["gamma2"]],
        [Fraction(str(v)) for v in obj["gamma3"]],
        Fraction(str(obj["a"])), Fraction(str(obj["b"])),
        Fraction(str(obj["A"])), Fraction(str(obj["B"])),
        field=field,
    )


def gamma_from_file(path: str, p: ArmParams, field=QQ) -> DeformParams:
    with open(path, "r", encoding="utf-8") as fh:
        return gamma_from_json(json.load(fh), p, field)


def parse_gamma_spec(spec: str, p: ArmParams, field=QQ) -> DeformParams:
    """CLI gamma source: zero | file:PATH | random:SEED."""
    if spec == "zero":
        return zero_gamma(p, field)
    if spec.startswith("file:"):
        return gamma_from_file(spec[len("file:"):], p, field)
    if spec.startswith("random:"):
        return random_gamma(p, int(spec[len("random:"):]), field=field)
    raise ValueError(f"unknown gamma source {spec!r} (zero|file:PATH|random:SEED)")
