"""Buchberger engine: reduced Groebner bases and the certificates built on them.

Monomials are packed into Python ints twice over: an order ``code`` whose
integer comparison realises the active monomial order and whose integer
addition realises monomial multiplication, and a ``packed`` exponent vector
(16-bit fields, one guard bit each) supporting O(1) divisibility and lcm via
bit tricks.  Coefficient arithmetic is integer-only in both field modes:
fraction-free over the rationals (primitive integer polynomials, scaled
during reduction) and modular over a prime field.

Budgets cap S-pairs processed, polynomial degree and wall-clock time; a
breached budget raises :class:`Inconclusive`, never returns a wrong answer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappush, heappop
from math import gcd
from typing import Iterable, Sequence

from .poly import (
    GREVLEX,
    BlockOrder,
    MonomialOrder,
    Poly,
    QQ,
    PrimeField,
    VarTable,
    parse_order,
    parse_poly,
)

_FIELD_BITS = 16
_GUARD_BIT = 15
_CODE_BITS = 32
_MAX_EXP = (1 << _GUARD_BIT) - 1


class Inconclusive(RuntimeError):
    """A budget (S-pairs, degree or time) was exhausted before an answer."""

    def __init__(self, reason: str, **detail):
        super().__init__(reason + (f" [{detail}]" if detail else ""))
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class GroebnerBudget:
    """Caps for one basis computation; exceeding any raises Inconclusive."""

    max_spairs: int = 200_000
    max_degree: int = 200
    time_cap: float | None = None

    def fresh(self) -> "_BudgetState":
        return _BudgetState(self)


class _BudgetState:
    def __init__(self, cfg: GroebnerBudget):
        self.cfg = cfg
        self.spairs = 0
        self.t0 = time.monotonic()

    def tick_spair(self):
        self.spairs += 1
        if self.spairs > self.cfg.max_spairs:
            raise Inconclusive("S-pair budget exceeded", spairs=self.spairs)
        self.check_time()

    def check_degree(self, deg: int):
        if deg > self.cfg.max_degree:
            raise Inconclusive("degree budget exceeded", degree=deg)

    def check_time(self):
        if self.cfg.time_cap is not None and time.monotonic() - self.t0 > self.cfg.time_cap:
            raise Inconclusive("time budget exceeded", elapsed=time.monotonic() - self.t0)


DEFAULT_BUDGET = GroebnerBudget()


# ---------------------------------------------------------------------------
# monomial codec
# ---------------------------------------------------------------------------

class _Codec:
    """Packs exponent vectors for one (VarTable, MonomialOrder) pair."""

    def __init__(self, table: VarTable, order: MonomialOrder):
        n = len(table)
        self.n = n
        self.table = table
        self.order = order
        self.blocks = order.blocks_for(table)
        self._pshift = tuple(_FIELD_BITS * (n - 1 - i) for i in range(n))
        self.guard = 0
        for s in self._pshift:
            self.guard |= 1 << (s + _GUARD_BIT)
        self.mask_all = (1 << (_FIELD_BITS * n)) - 1

    def encode(self, exps) -> tuple[int, int]:
        packed = 0
        code = 0
        for i, e in enumerate(exps):
            if e > _MAX_EXP:
                raise Inconclusive("exponent exceeds packed-field capacity", exponent=e)
            packed += e << self._pshift[i]
        for block in self.blocks:
            bdeg = 0
            for i in block:
                bdeg += exps[i]
            code = (code << _CODE_BITS) | bdeg
            for i in reversed(block[1:]):
                code = (code << _CODE_BITS) | (bdeg - exps[i])
        return code, packed

    def decode(self, packed: int) -> tuple:
        return tuple((packed >> s) & 0xFFFF for s in self._pshift)

    def code_of_packed(self, packed: int) -> int:
        return self.encode(self.decode(packed))[0]

    def deg(self, packed: int) -> int:
        return sum((packed >> s) & 0xFFFF for s in self._pshift)

    def divides(self, divisor_packed: int, packed: int) -> bool:
        g = self.guard
        return ((packed | g) - divisor_packed) & g == g

    def lcm(self, a: int, b: int) -> int:
        g = self.guard
        sel = ((a | g) - b) & g
        mask = (sel >> _GUARD_BIT) * 0xFFFF
        return (a & mask) | (b & (self.mask_all ^ mask))

    def vars_mask(self, indices: Iterable[int]) -> int:
        m = 0
        for i in indices:
            m |= 0xFFFF << self._pshift[i]
        return m


# ---------------------------------------------------------------------------
# engine polynomials: lists of (code, packed, int coeff), descending by code
# ---------------------------------------------------------------------------

def _to_engine(p: Poly, codec: _Codec, mode: str, q: int):
    if not p.terms:
        return []
    items = []
    if mode == "zz":
        denlcm = 1
        for c in p.terms.values():
            denlcm = denlcm * c.denominator // gcd(denlcm, c.denominator)
        for exps, c in p.terms.items():
            code, packed = codec.encode(exps)
            items.append((code, packed, c.numerator * (denlcm // c.denominator)))
    else:
        for exps, c in p.terms.items():
            code, packed = codec.encode(exps)
            items.append((code, packed, c % q))
    items.sort(key=lambda t: t[0], reverse=True)
    return items


def _from_engine(terms, codec: _Codec, table: VarTable, field, mode: str, q: int,
                 monic: bool = True) -> Poly:
    if not terms:
        return Poly.zero(table, field)
    out = {}
    if mode == "zz":
        lead = terms[0][2]
        for code, packed, c in terms:
            out[codec.decode(packed)] = Fraction(c, lead) if monic else Fraction(c)
    else:
        inv = pow(terms[0][2], -1, q) if monic else 1
        for code, packed, c in terms:
            out[codec.decode(packed)] = c * inv % q
    return Poly(table, field, out)


def _normalize_zz(terms):
    """Strip integer content and make the leading coefficient positive."""
    if not terms:
        return terms
    g = 0
    for _, _, c in terms:
        g = gcd(g, c)
        if g == 1:
            break
    if terms[0][2] < 0:
        g = -g
    if g == 1:
        return terms
    return [(code, packed, c // g) for code, packed, c in terms]


def _make_monic_gf(terms, q):
    lead = terms[0][2]
    if lead == 1:
        return terms
    inv = pow(lead, -1, q)
    return [(code, packed, c * inv % q) for code, packed, c in terms]


def _reduce_full(terms, basis, codec: _Codec, mode: str, q: int,
                 bud: _BudgetState | None = None):
    """Full multivariate division of `terms` by `basis`; remainder, descending.

    `basis` entries are (lt_code, lt_packed, lt_coeff, tail) with tail the
    remaining terms.  GF basis elements must be monic; ZZ elements primitive
    with positive lead.
    """
    if not terms:
        return []
    guard = codec.guard
    coeffs = {}
    packs = {}
    heap = []
    for code, packed, c in terms:
        coeffs[code] = c
        packs[code] = packed
        heappush(heap, -code)
    out = []
    steps = 0
    gf = mode == "gf"
    while heap:
        code = -heappop(heap)
        c = coeffs.pop(code, None)
        if c is None:
            continue
        packed = packs.pop(code)
        red = None
        for be in basis:
            lp = be[1]
            if lp <= packed and ((packed | guard) - lp) & guard == guard:
                red = be
                break
        if red is None:
            out.append((code, packed, c))
            continue
        steps += 1
        if bud is not None and steps % 1024 == 0:
            bud.check_time()
        lt_code, lt_packed, lt_coeff, tail = red
        fcode = code - lt_code
        fpack = packed - lt_packed
        if gf:
            for tc, tp, tcf in tail:
                nc = tc + fcode
                cur = coeffs.get(nc)
                if cur is None:
                    v = -c * tcf % q
                    if v:
                        coeffs[nc] = v
                        packs[nc] = tp + fpack
                        heappush(heap, -nc)
                else:
                    v = (cur - c * tcf) % q
                    if v:
                        coeffs[nc] = v
                    else:
                        del coeffs[nc]
                        del packs[nc]
        else:
            # basis leads are positive, so d > 0 and mult > 0
            d = gcd(c, lt_coeff)
            mult = lt_coeff // d
            fc = c // d
            if mult != 1:
                for k in coeffs:
                    coeffs[k] *= mult
                if out:
                    out = [(oc, op, ov * mult) for oc, op, ov in out]
            for tc, tp, tcf in tail:
                nc = tc + fcode
                cur = coeffs.get(nc)
                if cur is None:
                    v = -fc * tcf
                    if v:
                        coeffs[nc] = v
                        packs[nc] = tp + fpack
                        heappush(heap, -nc)
                else:
                    v = cur - fc * tcf
                    if v:
                        coeffs[nc] = v
                    else:
                        del coeffs[nc]
                        del packs[nc]
    return out


def _as_basis_elem(terms):
    code, packed, c = terms[0]
    return (code, packed, c, tuple(terms[1:]))


def _spoly(gi, gj, lcm_code, lcm_packed, mode, q):
    ci, pi, ai = gi[0]
    cj, pj, aj = gj[0]
    acc = {}
    packs = {}
    if mode == "gf":
        mi, mj = 1, 1
    else:
        lam = ai * aj // gcd(ai, aj)
        mi, mj = lam // ai, lam // aj
    fci, fpi = lcm_code - ci, lcm_packed - pi
    for tc, tp, tcf in gi:
        nc = tc + fci
        acc[nc] = acc.get(nc, 0) + mi * tcf
        packs[nc] = tp + fpi
    fcj, fpj = lcm_code - cj, lcm_packed - pj
    for tc, tp, tcf in gj:
        nc = tc + fcj
        acc[nc] = acc.get(nc, 0) - mj * tcf
        packs[nc] = tp + fpj
    if mode == "gf":
        items = [(c, packs[c], v % q) for c, v in acc.items() if v % q]
    else:
        items = [(c, packs[c], v) for c, v in acc.items() if v]
    items.sort(key=lambda t: t[0], reverse=True)
    return items


def _buchberger(gens, codec: _Codec, mode: str, q: int, bud: _BudgetState):
    """Buchberger with the coprime and chain criteria, normal selection.

    A nonzero constant in the basis short-circuits to the unit ideal, which
    is sound: the reduced basis is then exactly {1}.
    """
    norm = (lambda t: _make_monic_gf(t, q)) if mode == "gf" else _normalize_zz

    G: list = []
    lt_packs: list[int] = []
    # seed basis by interreducing the input generators
    for g in sorted((g for g in gens if g), key=lambda t: t[0][0]):
        h = _reduce_full(g, [_as_basis_elem(x) for x in G], codec, mode, q, bud)
        if not h:
            continue
        h = norm(h)
        if h[0][1] == 0:  # constant: unit ideal
            return [[(0, 0, 1)]]
        G.append(h)
        lt_packs.append(h[0][1])

    pairs: list = []
    pending = set()

    def push_pairs(t: int):
        for i in range(t):
            lp = codec.lcm(lt_packs[i], lt_packs[t])
            deg = codec.deg(lp)
            bud.check_degree(deg)
            heappush(pairs, (deg, codec.code_of_packed(lp), lp, i, t))
            pending.add((i, t))

    for t in range(len(G)):
        push_pairs(t)

    basis_elems = [_as_basis_elem(g) for g in G]
    while pairs:
        deg, lcm_code, lcm_packed, i, j = heappop(pairs)
        pending.discard((i, j))
        bud.tick_spair()
        # coprime leading terms: S-pair reduces to zero
        if lcm_packed == lt_packs[i] + lt_packs[j]:
            continue
        # chain criterion: some LT(k) divides the lcm and both companion
        # pairs were already treated
        skip = False
        for k in range(len(G)):
            if k == i or k == j:
                continue
            if codec.divides(lt_packs[k], lcm_packed):
                a = (i, k) if i < k else (k, i)
                b = (j, k) if j < k else (k, j)
                if a not in pending and b not in pending:
                    skip = True
                    break
        if skip:
            continue
        s = _spoly(G[i], G[j], lcm_code, lcm_packed, mode, q)
        h = _reduce_full(s, basis_elems, codec, mode, q, bud)
        if not h:
            continue
        h = norm(h)
        if h[0][1] == 0:
            return [[(0, 0, 1)]]
        bud.check_degree(codec.deg(h[0][1]))
        t = len(G)
        G.append(h)
        lt_packs.append(h[0][1])
        basis_elems.append(_as_basis_elem(h))
        push_pairs(t)

    return _reduced_basis(G, codec, mode, q, bud)


def _reduced_basis(G, codec: _Codec, mode: str, q: int, bud: _BudgetState):
    """Minimalize and tail-reduce; the result is the unique reduced basis."""
    norm = (lambda t: _make_monic_gf(t, q)) if mode == "gf" else _normalize_zz
    order = sorted(range(len(G)), key=lambda k: G[k][0][0])
    kept: list = []
    for k in order:
        lt = G[k][0][1]
        if any(codec.divides(e[0][1], lt) for e in kept):
            continue
        kept.append(G[k])
    final = []
    for idx, g in enumerate(kept):
        others = [_as_basis_elem(h) for j, h in enumerate(kept) if j != idx]
        r = _reduce_full(g, others, codec, mode, q, bud)
        final.append(norm(r))
    final.sort(key=lambda t: t[0][0])
    return final


# ---------------------------------------------------------------------------
# public ideal interface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DimensionReport:
    """Krull dimension plus a witnessing maximal independent variable set.

    Dimension -1 means the unit ideal (empty variety); the witness then is
    empty.  Otherwise no leading monomial of the reduced basis is supported
    entirely inside the witness set, and no larger variable set has that
    property.
    """

    dimension: int
    witness: tuple


class Ideal:
    """Generators plus a lazily cached reduced Groebner basis."""

    def __init__(self, table: VarTable, gens: Sequence[Poly],
                 order: MonomialOrder = GREVLEX, field=None,
                 budget: GroebnerBudget = DEFAULT_BUDGET):
        gens = tuple(gens)
        for g in gens:
            if g.table != table:
                raise ValueError("generator on a different VarTable")
        if field is None:
            field = gens[0].field if gens else QQ
        for g in gens:
            if g.field != field:
                raise ValueError("generator over a different coefficient field")
        self.table = table
        self.field = field
        self.order = order
        self.gens = gens
        self.budget = budget
        self._codec = _Codec(table, order)
        self._mode = "gf" if isinstance(field, PrimeField) else "zz"
        self._q = field.q if isinstance(field, PrimeField) else 0
        self._basis_engine = None
        self._basis_poly = None

    # -- basis ---------------------------------------------------------------

    def _ensure_basis(self):
        if self._basis_engine is not None:
            return
        gens_engine = [_to_engine(g, self._codec, self._mode, self._q) for g in self.gens]
        bud = self.budget.fresh()
        basis = _buchberger(gens_engine, self._codec, self._mode, self._q, bud)
        self._basis_engine = basis
        self._basis_poly = tuple(
            _from_engine(t, self._codec, self.table, self.field, self._mode, self._q)
            for t in basis
        )

    def groebner_basis(self) -> tuple:
        """The reduced Groebner basis (monic, sorted by leading monomial)."""
        self._ensure_basis()
        return self._basis_poly

    def _basis_elems(self):
        self._ensure_basis()
        return [_as_basis_elem(t) for t in self._basis_engine]

    def _seed_basis(self, basis_engine, codec):
        # used by eliminate(): the filtered basis is already reduced
        self._basis_engine = basis_engine
        self._codec = codec
        self._basis_poly = tuple(
            _from_engine(t, codec, self.table, self.field, self._mode, self._q)
            for t in basis_engine
        )

    # -- queries -------------------------------------------------------------

    def normal_form(self, p: Poly) -> Poly:
        """Remainder of p on division by the reduced basis; 0 iff p is a member."""
        if p.table != self.table or p.field != self.field:
            raise ValueError("polynomial incompatible with ideal")
        if self._mode == "zz":
            # fraction-free reduction scales the work polynomial, so the
            # exact QQ remainder is recomputed by monic division here
            return self._exact_nf_qq(p)
        elems = self._basis_elems()
        terms = _to_engine(p, self._codec, self._mode, self._q)
        bud = self.budget.fresh()
        r = _reduce_full(terms, elems, self._codec, self._mode, self._q, bud)
        return _from_engine(r, self._codec, self.table, self.field, self._mode,
                            self._q, monic=False)

    def _exact_nf_qq(self, p: Poly) -> Poly:
        basis = self.groebner_basis()
        order = self.order
        lead = [bp.sorted_terms(order)[0] for bp in basis]
        work = dict(p.terms)
        out: dict = {}
        table, field = self.table, self.field
        while work:
            exps = max(work, key=lambda e: order.sort_key(e, table))
            c = work.pop(exps)
            hit = None
            for (lexps, lc), bp in zip(lead, basis):
                if all(a >= b for a, b in zip(exps, lexps)):
                    hit = (lexps, lc, bp)
                    break
            if hit is None:
                out[exps] = c
                continue
            lexps, lc, bp = hit
            shift = tuple(a - b for a, b in zip(exps, lexps))
            fac = c / lc
            for bexps, bc in bp.terms.items():
                if bexps == lexps:
                    continue  # the leading term cancels against c exactly
                nexps = tuple(map(int.__add__, bexps, shift))
                cur = work.get(nexps, field.zero)
                v = field.sub(cur, field.mul(fac, bc))
                if v == field.zero:
                    work.pop(nexps, None)
                else:
                    work[nexps] = v
        return Poly(table, field, out)

    def contains(self, p: Poly) -> bool:
        """Exact ideal membership via normal form."""
        if p.is_zero():
            return True
        elems = self._basis_elems()
        terms = _to_engine(p, self._codec, self._mode, self._q)
        bud = self.budget.fresh()
        return not _reduce_full(terms, elems, self._codec, self._mode, self._q, bud)

    def contains_one(self) -> bool:
        """True iff the ideal is the whole ring (empty variety)."""
        self._ensure_basis()
        b = self._basis_engine
        return len(b) == 1 and b[0][0][1] == 0

    def __repr__(self):
        return f"Ideal({len(self.gens)} gens over {self.field!r}, order {self.order!r})"


def groebner_basis(ideal: Ideal) -> tuple:
    return ideal.groebner_basis()


def normal_form(p: Poly, ideal: Ideal) -> Poly:
    return ideal.normal_form(p)


def contains(p: Poly, ideal: Ideal) -> bool:
    return ideal.contains(p)


def contains_one(ideal: Ideal) -> bool:
    return ideal.contains_one()


def eliminate(ideal: Ideal, drop: Iterable[str],
              budget: GroebnerBudget | None = None) -> Ideal:
    """Intersect with the subring omitting `drop`, via a block elimination order.

    The result lives on the reduced VarTable and arrives with its reduced
    basis already cached (the filtered basis is one, by the elimination
    property of block orders).
    """
    drop = list(drop)
    for name in drop:
        if name not in ideal.table:
            raise KeyError(f"unknown variable {name!r}")
    drop_set = set(drop)
    if not drop_set:
        return ideal
    keep = [n for n in ideal.table.names if n not in drop_set]
    drop_ordered = [n for n in ideal.table.names if n in drop_set]
    order = BlockOrder([drop_ordered, keep]) if keep else GREVLEX
    work = Ideal(ideal.table, ideal.gens, order=order, field=ideal.field,
                 budget=budget or ideal.budget)
    work._ensure_basis()
    codec = work._codec
    dmask = codec.vars_mask([ideal.table.index(n) for n in drop_ordered])
    survivors = [t for t in work._basis_engine
                 if all(p & dmask == 0 for _, p, _ in t)]
    if not keep:
        raise ValueError("cannot eliminate every variable")
    new_table = VarTable(keep)
    new_codec = _Codec(new_table, GREVLEX)
    remapped = []
    for t in survivors:
        p = _from_engine(t, codec, ideal.table, ideal.field, work._mode, work._q)
        p2 = p.rename(new_table)
        remapped.append((_to_engine(p2, new_codec, work._mode, work._q), p2))
    remapped.sort(key=lambda tp: tp[0][0][0])
    out = Ideal(new_table, [p for _, p in remapped], order=GREVLEX,
                field=ideal.field, budget=budget or ideal.budget)
    out._seed_basis([t for t, _ in remapped], new_codec)
    return out


def krull_dimension(ideal: Ideal) -> DimensionReport:
    """Combinatorial dimension from the leading-term ideal.

    dim = n - (minimum hitting set of the leading-monomial supports); a
    variable set is independent iff it contains no leading support entirely,
    i.e. iff its complement hits every support.
    """
    basis = ideal.groebner_basis()
    n = len(ideal.table)
    if ideal.contains_one():
        return DimensionReport(-1, ())
    supports = []
    for bp in basis:
        lexps = bp.sorted_terms(ideal.order)[0][0]
        supports.append(frozenset(i for i, e in enumerate(lexps) if e))
    # minimalize: keep only inclusion-minimal supports
    supports.sort(key=len)
    minimal: list[frozenset] = []
    for s in supports:
        if not any(m <= s for m in minimal):
            minimal.append(s)
    if not minimal:
        return DimensionReport(n, tuple(ideal.table.names))
    best: list = [None]

    def search(idx: int, hitting: set):
        if best[0] is not None and len(hitting) >= len(best[0]):
            return
        while idx < len(minimal) and minimal[idx] & hitting:
            idx += 1
        if idx == len(minimal):
            best[0] = set(hitting)
            return
        for v in sorted(minimal[idx]):
            hitting.add(v)
            search(idx + 1, hitting)
            hitting.remove(v)

    search(0, set())
    hit = best[0]
    witness = tuple(ideal.table.names[i] for i in range(n) if i not in hit)
    return DimensionReport(n - len(hit), witness)


def ideals_equal(a: Ideal, b: Ideal) -> bool:
    """True iff the two ideals coincide (same VarTable and field required)."""
    if a.table != b.table:
        raise ValueError("ideals on different VarTables")
    if a.field != b.field:
        raise ValueError("ideals over different coefficient fields")
    if a.order == b.order:
        return a.groebner_basis() == b.groebner_basis()
    return all(a.contains(g) for g in b.gens) and all(b.contains(g) for g in a.gens)


def leading_term(p: Poly, order: MonomialOrder = GREVLEX):
    """(exponents, coefficient) of the leading term under the given order."""
    if p.is_zero():
        raise ValueError("zero polynomial has no leading term")
    return p.sorted_terms(order)[0]


# ---------------------------------------------------------------------------
# ideal text files
# ---------------------------------------------------------------------------

def write_ideal_text(ideal: Ideal, order_spec: str | None = None) -> str:
    lines = [
        "vars: " + ", ".join(ideal.table.names),
        "order: " + (order_spec or ideal.order.spec()),
    ]
    for g in ideal.gens:
        lines.append(g.to_str(ideal.order))
    return "\n".join(lines) + "\n"


def read_ideal_text(text: str, field=QQ,
                    budget: GroebnerBudget = DEFAULT_BUDGET) -> Ideal:
    """Parse the one-polynomial-per-line format with vars/order header."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("vars:"):
        raise ValueError("ideal file must start with a 'vars:' header")
    names = [n.strip() for n in lines[0][len("vars:"):].split(",") if n.strip()]
    table = VarTable(names)
    order = GREVLEX
    body = lines[1:]
    if body and body[0].startswith("order:"):
        order = parse_order(body[0][len("order:"):].strip())
        body = body[1:]
    gens = [parse_poly(ln, table, field) for ln in body]
    return Ideal(table, gens, order=order, field=field, budget=budget)
