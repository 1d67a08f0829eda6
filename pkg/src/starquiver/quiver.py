"""The 3-armed double star quiver: vertices, arrows, path products, stability.

Vertices: an extended vertex at the top, chains of arm vertices, and one
bottom vertex.  Arm i carries the downward arrows d<i>_1 .. d<i>_<p_i>
(extended vertex down to the bottom vertex) and the reversing upward arrows
u<i>_1 .. u<i>_<p_i>.  At the scalar dimension vector all arrow products
commute, so paths live in an ordinary polynomial ring on the arrow names.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .poly import Poly, QQ, VarTable, poly_prod

EXTENDED = "ext"
BOTTOM = "bot"


@dataclass(frozen=True)
class ArmParams:
    """Arm lengths p1, p2, p3 (arm i of the dual graph has p_i - 1 curves)."""

    p1: int
    p2: int
    p3: int

    def __post_init__(self):
        for v in (self.p1, self.p2, self.p3):
            if not isinstance(v, int) or v < 2:
                raise ValueError(f"arm parameters must be integers >= 2, got {v}")

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3))

    def __getitem__(self, arm: int) -> int:
        return (self.p1, self.p2, self.p3)[arm - 1]

    @classmethod
    def parse(cls, spec) -> "ArmParams":
        if isinstance(spec, ArmParams):
            return spec
        if isinstance(spec, str):
            parts = [int(x) for x in spec.split(",")]
        else:
            parts = list(spec)
        if len(parts) != 3:
            raise ValueError(f"expected three arm parameters, got {spec!r}")
        return cls(*parts)

    def label(self) -> str:
        return f"{self.p1},{self.p2},{self.p3}"


def arm_vertex(arm: int, k: int) -> str:
    return f"arm{arm}_{k}"


def d_arrow(arm: int, j: int) -> str:
    return f"d{arm}_{j}"


def u_arrow(arm: int, j: int) -> str:
    return f"u{arm}_{j}"


class StarQuiver:
    """Double star quiver with its arrow ring, path products and stability data."""

    def __init__(self, p: ArmParams, field=QQ):
        self.p = p
        self.field = field

        vertices = [EXTENDED]
        for arm in (1, 2, 3):
            vertices += [arm_vertex(arm, k) for k in range(1, p[arm])]
        vertices.append(BOTTOM)
        self.vertices = tuple(vertices)

        # d<i>_j runs from the (j-1)-th to the j-th station down arm i,
        # with station 0 the extended vertex and station p_i the bottom
        arrows: dict[str, tuple[str, str]] = {}
        for arm in (1, 2, 3):
            chain = [EXTENDED] + [arm_vertex(arm, k) for k in range(1, p[arm])] + [BOTTOM]
            for j in range(1, p[arm] + 1):
                arrows[d_arrow(arm, j)] = (chain[j - 1], chain[j])
            for j in range(1, p[arm] + 1):
                arrows[u_arrow(arm, j)] = (chain[j], chain[j - 1])
        self.arrows = arrows

        names = []
        for arm in (1, 2, 3):
            names += [d_arrow(arm, j) for j in range(1, p[arm] + 1)]
            names += [u_arrow(arm, j) for j in range(1, p[arm] + 1)]
        self.table = VarTable(names)

        self.dimension_vector = {v: 1 for v in self.vertices}
        top = sum(pi - 1 for pi in p) + 1
        self.theta0 = {v: (-top if v == EXTENDED else 1) for v in self.vertices}

    # -- path products -------------------------------------------------------

    def arrow_poly(self, name: str) -> Poly:
        return Poly.var(self.table, self.field, name)

    def D(self, arm: int) -> Poly:
        """Full downward path product along the arm."""
        return poly_prod(
            (self.arrow_poly(d_arrow(arm, j)) for j in range(1, self.p[arm] + 1)),
            self.table, self.field,
        )

    def U(self, arm: int) -> Poly:
        """Full upward path product along the arm."""
        return poly_prod(
            (self.arrow_poly(u_arrow(arm, j)) for j in range(self.p[arm], 0, -1)),
            self.table, self.field,
        )

    def two_cycle(self, arm: int, j: int) -> Poly:
        return self.arrow_poly(d_arrow(arm, j)) * self.arrow_poly(u_arrow(arm, j))

    def two_cycles(self) -> list[tuple[str, Poly]]:
        return [
            (f"v{arm}_{j}", self.two_cycle(arm, j))
            for arm in (1, 2, 3)
            for j in range(1, self.p[arm] + 1)
        ]

    # -- torus action ---------------------------------------------------------

    def torus_weight(self, monomial) -> dict[str, int]:
        """Weight of an arrow monomial under conjugation by the vertex torus.

        Each arrow contributes e_head - e_tail; a monomial is a Poly with a
        single term or a raw exponent tuple over the arrow VarTable.
        """
        if isinstance(monomial, Poly):
            if monomial.table != self.table:
                raise ValueError("monomial on a foreign VarTable")
            if len(monomial.terms) != 1:
                raise ValueError("torus weight is defined for single monomials")
            exps = next(iter(monomial.terms))
        else:
            exps = tuple(monomial)
            if len(exps) != len(self.table):
                raise ValueError("exponent vector length mismatch")
        weight = {v: 0 for v in self.vertices}
        for name, e in zip(self.table.names, exps):
            if not e:
                continue
            tail, head = self.arrows[name]
            weight[head] += e
            weight[tail] -= e
        return weight

    def is_weight_zero(self, monomial) -> bool:
        return all(w == 0 for w in self.torus_weight(monomial).values())

    def summary(self) -> dict:
        """JSON-ready description: vertices, arrows, stability, path products."""
        return {
            "p": list(self.p),
            "vertices": list(self.vertices),
            "arrows": {a: {"tail": t, "head": h} for a, (t, h) in self.arrows.items()},
            "theta0": {v: self.theta0[v] for v in self.vertices},
            "D": {str(i): self.D(i).to_str() for i in (1, 2, 3)},
            "U": {str(i): self.U(i).to_str() for i in (1, 2, 3)},
        }


def build_star_quiver(p, field=QQ) -> StarQuiver:
    return StarQuiver(ArmParams.parse(p), field=field)


# ---------------------------------------------------------------------------
# supports, stability, chart membership
# ---------------------------------------------------------------------------

class Support:
    """A nonzero/zero marking of every arrow."""

    __slots__ = ("nonzero",)

    def __init__(self, nonzero: Iterable[str]):
        self.nonzero = frozenset(nonzero)

    def __contains__(self, arrow: str) -> bool:
        return arrow in self.nonzero

    @classmethod
    def from_bits(cls, Q: StarQuiver, bits: int) -> "Support":
        names = Q.table.names
        return cls(names[i] for i in range(len(names)) if bits >> i & 1)

    @classmethod
    def all_nonzero(cls, Q: StarQuiver) -> "Support":
        return cls(Q.table.names)

    def __repr__(self):
        return f"Support({sorted(self.nonzero)})"


def is_stable_support(s: Support, Q: StarQuiver) -> bool:
    """King stability at the scalar dimension vector: every vertex reachable
    from the extended vertex along arrows marked nonzero."""
    reached = {EXTENDED}
    frontier = [EXTENDED]
    out_edges: dict[str, list[str]] = {v: [] for v in Q.vertices}
    for name, (tail, head) in Q.arrows.items():
        if name in s.nonzero:
            out_edges[tail].append(head)
    while frontier:
        v = frontier.pop()
        for w in out_edges[v]:
            if w not in reached:
                reached.add(w)
                frontier.append(w)
    return len(reached) == len(Q.vertices)


@dataclass(frozen=True, order=True)
class ChartId:
    """Chart U^k_{i,j}: arm k scaled to the identity, 1-based indices i, j
    along the other two arms (U^k_{i,j} has the conditions of V^k_{i-1,j-1})."""

    k: int
    i: int
    j: int

    def label(self) -> str:
        return f"U{self.k}[{self.i},{self.j}]"

    def other_arms(self) -> tuple[int, int]:
        return {1: (2, 3), 2: (1, 3), 3: (1, 2)}[self.k]


def all_chart_ids(p: ArmParams) -> list[ChartId]:
    out = []
    for k in (1, 2, 3):
        a, b = {1: (2, 3), 2: (1, 3), 3: (1, 2)}[k]
        for i in range(1, p[a] + 1):
            for j in range(1, p[b] + 1):
                out.append(ChartId(k, i, j))
    return out


def chart_unit_arrows(c: ChartId, p: ArmParams) -> list[str]:
    """Arrows required nonzero by the chart (scaled to 1 in presentations)."""
    arm_a, arm_b = c.other_arms()
    units = [d_arrow(c.k, j) for j in range(1, p[c.k] + 1)]
    units += [d_arrow(arm_a, m) for m in range(1, c.i)]
    units += [u_arrow(arm_a, m) for m in range(c.i + 1, p[arm_a] + 1)]
    units += [d_arrow(arm_b, m) for m in range(1, c.j)]
    units += [u_arrow(arm_b, m) for m in range(c.j + 1, p[arm_b] + 1)]
    return units


def chart_supports(s: Support, Q: StarQuiver) -> list[ChartId]:
    """All charts whose defining nonzero conditions hold for the support.

    Purely combinatorial: empty index ranges are vacuously true and no
    stability or relation check is applied.
    """
    out = []
    for c in all_chart_ids(Q.p):
        if all(a in s.nonzero for a in chart_unit_arrows(c, Q.p)):
            out.append(c)
    return out


def full_down_arms(s: Support, Q: StarQuiver) -> list[int]:
    """Arms whose complete downward path is marked nonzero."""
    return [
        arm for arm in (1, 2, 3)
        if all(d_arrow(arm, j) in s.nonzero for j in range(1, Q.p[arm] + 1))
    ]


def is_relation_compatible(s: Support, Q: StarQuiver) -> bool:
    """Necessary support condition from the canonical relation at scalar
    points: at least two full downward paths, or none at all."""
    n = len(full_down_arms(s, Q))
    return n >= 2 or n == 0
