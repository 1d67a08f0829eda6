"""Relation systems, the parameter subspace, and representation ideals."""

from fractions import Fraction

import pytest

from starquiver.groebner import contains_one
from starquiver.poly import Poly, QQ, parse_poly
from starquiver.quiver import ArmParams, build_star_quiver
from starquiver.reconstruction import (
    canonical_relation,
    deformed_relations,
    delta_forms,
    gamma_from_json,
    in_delta,
    make_gamma,
    parse_gamma_spec,
    random_gamma,
    rep_ideal,
    zero_gamma,
)

P222 = ArmParams(2, 2, 2)


def test_canonical_relation_smallest_case():
    Q = build_star_quiver(P222)
    assert canonical_relation(Q) == parse_poly("d1_1*d1_2 - d2_1*d2_2 + d3_1*d3_2", Q.table)


def test_canonical_relation_degrees_and_signs():
    p = ArmParams(4, 3, 2)
    Q = build_star_quiver(p)
    rel = canonical_relation(Q)
    assert sorted(sum(e) for e in rel.terms) == [2, 3, 4]
    assert rel.coeff_of(next(iter(Q.D(1).terms))) == 1
    assert rel.coeff_of(next(iter(Q.D(2).terms))) == -1
    assert rel.coeff_of(next(iter(Q.D(3).terms))) == 1


def test_relation_count_and_quadratic_shape():
    Q = build_star_quiver(P222)
    rels = deformed_relations(Q, zero_gamma(P222))
    assert len(rels) == 8
    for label, poly in rels:
        if label == "(x)":
            continue
        assert poly.total_degree() == 2


def test_relation_a_with_scalar():
    Q = build_star_quiver(P222)
    gamma = make_gamma(P222, [0], [0], [0], a=5, b=0, A=0, B=0)
    rel = deformed_relations(Q, gamma).by_label("(a)")
    assert rel == parse_poly("d2_1*u2_1 - d1_1*u1_1 - 5", Q.table)


def test_zero_gamma_reproduces_undeformed_relations():
    Q = build_star_quiver((3, 2, 2))
    rels = deformed_relations(Q, zero_gamma(ArmParams(3, 2, 2)))
    av = Q.arrow_poly
    assert rels.by_label("(1).1") == av("u1_1") * av("d1_1") - av("d1_2") * av("u1_2")
    assert rels.by_label("(c)") == av("u1_3") * av("d1_3") - av("u2_2") * av("d2_2")
    assert rels.by_label("(x)") == canonical_relation(Q)


# ---------------------------------------------------------------------------
# the parameter subspace
# ---------------------------------------------------------------------------

def test_zero_gamma_in_delta():
    assert in_delta(zero_gamma(P222))


def test_delta_membership_forced_by_formula():
    gamma = make_gamma(P222, [1], [0], [0], a=-1, b=0, A=0, B=0)
    assert in_delta(gamma)


def test_delta_violated_by_single_entry():
    gamma = make_gamma(P222, [1], [0], [0], a=0, b=0, A=0, B=0)
    assert not in_delta(gamma)
    assert delta_forms(gamma)[0] == 1


def test_telescoping_relation_sums():
    # summing (1) - (2) + (a) + (c) collapses every cycle monomial and leaves
    # minus the first subspace form; same for (3) - (2) + (b) + (d)
    for p in [(2, 2, 2), (4, 3, 2)]:
        p = ArmParams.parse(p)
        Q = build_star_quiver(p)
        gamma = random_gamma(p, seed=9, inside_delta=False)
        rels = deformed_relations(Q, gamma)
        zero = Poly.zero(Q.table, QQ)
        s1 = sum((rels.by_label(f"(1).{k}") for k in range(1, p.p1)), zero)
        s2 = sum((rels.by_label(f"(2).{k}") for k in range(1, p.p2)), zero)
        s3 = sum((rels.by_label(f"(3).{k}") for k in range(1, p.p3)), zero)
        f1, f2 = delta_forms(gamma)
        combo1 = s1 - s2 + rels.by_label("(a)") + rels.by_label("(c)")
        combo2 = s3 - s2 + rels.by_label("(b)") + rels.by_label("(d)")
        assert combo1 == Poly.const(Q.table, QQ, -f1)
        assert combo2 == Poly.const(Q.table, QQ, -f2)


def test_random_gamma_is_seeded_and_lands_where_asked():
    g1 = random_gamma(P222, seed=4)
    g2 = random_gamma(P222, seed=4)
    assert g1 == g2
    assert in_delta(g1)
    g3 = random_gamma(P222, seed=4, inside_delta=False)
    assert not in_delta(g3)


# ---------------------------------------------------------------------------
# representation ideals
# ---------------------------------------------------------------------------

def test_rep_ideal_generator_count():
    Q = build_star_quiver(P222)
    I = rep_ideal(Q, zero_gamma(P222))
    assert len(I.gens) == 8


def test_rep_ideal_unit_outside_delta():
    Q = build_star_quiver(P222)
    gamma = make_gamma(P222, [1], [0], [0], a=0, b=0, A=0, B=0)
    assert contains_one(rep_ideal(Q, gamma))


def test_rep_ideal_unit_outside_delta_all_suite_sizes():
    for p in [(2, 2, 2), (3, 2, 2), (2, 2, 3), (3, 3, 3), (4, 3, 2)]:
        p = ArmParams.parse(p)
        Q = build_star_quiver(p)
        gamma = random_gamma(p, seed=1, inside_delta=False)
        assert contains_one(rep_ideal(Q, gamma)), p


def test_rep_ideal_not_unit_inside_delta():
    Q = build_star_quiver(P222)
    gamma = random_gamma(P222, seed=2)
    assert not contains_one(rep_ideal(Q, gamma))


# ---------------------------------------------------------------------------
# gamma I/O
# ---------------------------------------------------------------------------

def test_gamma_json_round_trip():
    gamma = random_gamma(ArmParams(3, 2, 2), seed=5)
    obj = gamma.to_json()
    back = gamma_from_json(obj, ArmParams(3, 2, 2))
    assert back == gamma


def test_gamma_json_specifiers():
    assert gamma_from_json("zero", P222) == zero_gamma(P222)
    assert gamma_from_json("random(6)", P222) == random_gamma(P222, seed=6)
    with pytest.raises(ValueError):
        gamma_from_json("sideways", P222)
    with pytest.raises(ValueError, match="missing"):
        gamma_from_json({"gamma1": []}, P222)


def test_gamma_spec_parsing(tmp_path):
    assert parse_gamma_spec("zero", P222) == zero_gamma(P222)
    assert parse_gamma_spec("random:3", P222) == random_gamma(P222, seed=3)
    path = tmp_path / "gamma.json"
    path.write_text(
        '{"gamma1": ["1/2"], "gamma2": ["0"], "gamma3": ["0"],'
        ' "a": "-1/2", "b": "0", "A": "0", "B": "0"}',
        encoding="utf-8",
    )
    g = parse_gamma_spec(f"file:{path}", P222)
    assert g.gamma1 == (Fraction(1, 2),)
    assert in_delta(g)
    with pytest.raises(ValueError):
        parse_gamma_spec("bogus:thing", P222)


def test_gamma_length_mismatch_rejected():
    with pytest.raises(ValueError):
        make_gamma(P222, [1, 2], [0], [0], a=0, b=0, A=0, B=0)
