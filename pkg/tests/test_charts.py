"""Chart presentations, the substitution oracle, certificates, cover."""

import random
from fractions import Fraction

import pytest

from starquiver.charts import (
    certify_presentation,
    chart_by_substitution,
    euler_identity_check,
    fibre_chart,
    fibre_witness_point,
    jacobian_ideal_generators,
    quotient_nonzero_check,
    smoothness_certificate,
    total_space_chart,
    verify_cover,
)
from starquiver.groebner import (
    GroebnerBudget,
    Ideal,
    contains,
    contains_one,
    ideals_equal,
)
from starquiver.poly import VarTable, parse_poly
from starquiver.quiver import ArmParams, ChartId, all_chart_ids, build_star_quiver
from starquiver.reconstruction import (
    deformed_relations,
    make_gamma,
    random_gamma,
    zero_gamma,
)

P222 = ArmParams(2, 2, 2)


# ---------------------------------------------------------------------------
# total-space charts
# ---------------------------------------------------------------------------

def test_total_space_chart_smallest_case():
    pres = total_space_chart(P222, ChartId(1, 1, 1))
    assert len(pres.table) == 8
    assert pres.relations == (parse_poly("1 - d2_1*d2_2 + d3_1*d3_2", pres.table),)


def test_total_space_variable_count():
    for p in [(2, 2, 2), (3, 2, 2), (4, 3, 2)]:
        p = ArmParams.parse(p)
        for c in all_chart_ids(p):
            pres = total_space_chart(p, c)
            assert len(pres.table) == p.p1 + p.p2 + p.p3 + 2
            assert len(pres.relations) == 1


def test_total_space_sign_pattern():
    # the scaled-out arm keeps the canonical sign: +1 for arms 1 and 3,
    # -1 for arm 2
    p = ArmParams(2, 3, 2)
    assert total_space_chart(p, ChartId(1, 1, 1)).relations[0].constant_value() == 1
    assert total_space_chart(p, ChartId(2, 1, 1)).relations[0].constant_value() == -1
    assert total_space_chart(p, ChartId(3, 1, 1)).relations[0].constant_value() == 1


def test_total_space_substitution_covers_all_arrows():
    p = ArmParams(3, 2, 2)
    Q = build_star_quiver(p)
    for c in all_chart_ids(p):
        pres = total_space_chart(p, c)
        assert set(pres.substitution) == set(Q.table.names)


def test_total_space_chart_out_of_range():
    with pytest.raises(ValueError):
        total_space_chart(P222, ChartId(1, 3, 1))


# ---------------------------------------------------------------------------
# fibre charts
# ---------------------------------------------------------------------------

def test_fibre_chart_smallest_case():
    gamma = make_gamma(P222, ["1/2"], ["1/3"], ["1/4"],
                       a="-1/6", b="1/12", A=0, B=0)
    assert not (Fraction(1, 2) - Fraction(1, 3) + 0 + Fraction(-1, 6))
    pres = fibre_chart(P222, gamma, ChartId(1, 1, 1))
    t = pres.table
    assert t.names == ("d2_1", "u2_1", "d3_1", "u3_1")
    assert pres.relations[0] == parse_poly("d2_1*u2_1 - d3_1*u3_1 - 1/12", t)
    assert pres.relations[1] == parse_poly(
        "1 - d2_1*(d2_1*u2_1 - 1/3) + d3_1*(d3_1*u3_1 - 1/4)", t)


def test_fibre_chart_zero_gamma_power_form():
    p = ArmParams(3, 3, 3)
    pres = fibre_chart(p, zero_gamma(p), ChartId(1, 1, 2))
    t = pres.table
    # with all gammas zero: f2 = 1 - d^(p-i+1) u^(p-i) + d^(p-j+1) u^(p-j)
    assert pres.relations[1] == parse_poly(
        "1 - d2_1^3*u2_1^2 + d3_2^2*u3_2", t)


def test_fibre_chart_boundary_collapses_to_single_factor():
    p = ArmParams(2, 3, 2)
    gamma = random_gamma(p, seed=17)
    pres = fibre_chart(p, gamma, ChartId(1, 3, 1))
    f2 = pres.relations[1]
    # i = p2: the arm-2 product is the bare chart variable
    d = parse_poly("d2_3", pres.table)
    g3 = gamma.gamma3
    expected = parse_poly("1", pres.table) - d + parse_poly("d3_1", pres.table) * (
        parse_poly("d3_1*u3_1", pres.table)
        - parse_poly("1", pres.table).scale(g3[0]))
    assert f2 == expected


def test_fibre_chart_rejects_gamma_outside_delta():
    gamma = make_gamma(P222, [1], [0], [0], a=0, b=0, A=0, B=0)
    with pytest.raises(ValueError, match="subspace"):
        fibre_chart(P222, gamma, ChartId(1, 1, 1))


def test_fibre_substitution_covers_arrows_and_lands_in_ideal():
    for p in [(2, 2, 2), (3, 2, 2), (2, 2, 3)]:
        p = ArmParams.parse(p)
        Q = build_star_quiver(p)
        gamma = random_gamma(p, seed=23)
        rels = deformed_relations(Q, gamma)
        for c in all_chart_ids(p):
            pres = fibre_chart(p, gamma, c)
            assert set(pres.substitution) == set(Q.table.names)
            chart_ideal = pres.ideal()
            for _, rel in rels:
                image = rel.substitute(
                    {a: e.rename(Q.table) for a, e in pres.substitution.items()})
                assert contains(image.rename(pres.table), chart_ideal)


# ---------------------------------------------------------------------------
# the substitution-derived oracle
# ---------------------------------------------------------------------------

def test_oracle_agreement_zero_gamma_smallest_case():
    Q = build_star_quiver(P222)
    gamma = zero_gamma(P222)
    for c in all_chart_ids(P222):
        closed = fibre_chart(P222, gamma, c)
        derived = chart_by_substitution(Q, gamma, c)
        assert ideals_equal(closed.ideal(), derived.ideal())


def test_oracle_agreement_random_gamma_all_charts():
    p = ArmParams(3, 2, 2)
    Q = build_star_quiver(p)
    gamma = random_gamma(p, seed=31)
    for c in all_chart_ids(p):
        closed = fibre_chart(p, gamma, c)
        derived = chart_by_substitution(Q, gamma, c)
        assert ideals_equal(closed.ideal(), derived.ideal())


def test_oracle_survivors_contain_plus_minus_first_relation():
    # relations (a)/(c) dissolve into the solve; (b) and (d) survive as the
    # first chart relation up to sign
    Q = build_star_quiver(P222)
    gamma = random_gamma(P222, seed=37)
    for c in all_chart_ids(P222):
        closed = fibre_chart(P222, gamma, c)
        derived = chart_by_substitution(Q, gamma, c)
        f1 = closed.relations[0]
        assert len(derived.relations) == 3
        signs = [r for r in derived.relations if r == f1 or r == -f1]
        assert len(signs) == 2
        assert closed.relations[1] in derived.relations


def test_oracle_total_space_mode():
    Q = build_star_quiver(P222)
    for c in all_chart_ids(P222):
        closed = total_space_chart(P222, c)
        derived = chart_by_substitution(Q, None, c)
        assert derived.relations == closed.relations


def test_oracle_substitutions_match_closed_form():
    Q = build_star_quiver(P222)
    gamma = random_gamma(P222, seed=41)
    for c in all_chart_ids(P222):
        closed = fibre_chart(P222, gamma, c)
        derived = chart_by_substitution(Q, gamma, c)
        assert derived.substitution == closed.substitution


# ---------------------------------------------------------------------------
# smoothness certificates
# ---------------------------------------------------------------------------

def test_undeformed_chart_is_smooth():
    pres = total_space_chart(P222, ChartId(1, 1, 1))
    cert = smoothness_certificate(pres)
    assert cert.status == "smooth"
    assert cert.one_in_jacobian


def test_deformed_chart_smooth_of_dimension_two():
    p = ArmParams(3, 3, 3)
    gamma = random_gamma(p, seed=43)
    pres = fibre_chart(p, gamma, ChartId(2, 2, 1))
    cert = smoothness_certificate(pres, expected_dim=2)
    assert cert.status == "smooth"
    assert cert.dimension.dimension == 2


def test_jacobian_generator_count_for_two_relations():
    gamma = random_gamma(P222, seed=47)
    pres = fibre_chart(P222, gamma, ChartId(1, 1, 1))
    gens = jacobian_ideal_generators(pres)
    assert len(gens) == 2 + 6  # both relations plus all six 2x2 minors


def test_control_presentation_is_singular():
    t = VarTable(["x", "y"])
    cert = certify_presentation(t, [parse_poly("x*y", t)])
    assert cert.status == "singular"
    assert not cert.one_in_jacobian


def test_certificate_budget_inconclusive():
    gamma = random_gamma(P222, seed=53)
    pres = fibre_chart(P222, gamma, ChartId(1, 1, 1))
    cert = smoothness_certificate(pres, expected_dim=2,
                                  budget=GroebnerBudget(max_spairs=0))
    assert cert.status == "inconclusive"
    assert cert.one_in_jacobian is None


def test_dimension_mismatch_is_not_smooth():
    gamma = random_gamma(P222, seed=59)
    pres = fibre_chart(P222, gamma, ChartId(1, 1, 1))
    cert = smoothness_certificate(pres, expected_dim=3)
    assert cert.status == "singular"
    assert cert.one_in_jacobian  # smooth Jacobian, wrong dimension target


# ---------------------------------------------------------------------------
# witness points
# ---------------------------------------------------------------------------

def test_witness_point_satisfies_every_relation():
    for p in [(2, 2, 2), (3, 3, 3), (4, 3, 2)]:
        p = ArmParams.parse(p)
        Q = build_star_quiver(p)
        gamma = random_gamma(p, seed=61)
        point = fibre_witness_point(p, gamma)
        for _, rel in deformed_relations(Q, gamma):
            assert rel.evaluate(point) == 0


def test_chart_relations_never_generate_the_unit_ideal():
    # the second relation is not a unit in the chart ring: 1 never lies in
    # the relation ideal for sampled parameters
    for p in [(2, 2, 2), (4, 3, 2)]:
        p = ArmParams.parse(p)
        gamma = random_gamma(p, seed=73)
        for c in all_chart_ids(p):
            pres = fibre_chart(p, gamma, c)
            assert not contains_one(pres.ideal())


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------

def test_euler_identity_empty_product():
    assert euler_identity_check(0, [])


def test_euler_identity_hand_case():
    assert euler_identity_check(1, [2])


def test_euler_identity_random_cubics():
    rng = random.Random(67)
    for _ in range(20):
        alphas = [Fraction(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(3)]
        assert euler_identity_check(3, alphas)


def test_quotient_nonzero_zero_parameters():
    assert quotient_nonzero_check([0, 0], [0])


def test_quotient_nonzero_random_parameters():
    rng = random.Random(71)
    for _ in range(10):
        n = rng.randint(1, 4)
        m = rng.randint(1, 4)
        alphas = [Fraction(rng.randint(-10, 10)) for _ in range(n)]
        betas = [Fraction(rng.randint(-10, 10)) for _ in range(m - 1)]
        assert quotient_nonzero_check(alphas, betas)


def test_unit_ideal_control_detected():
    t = VarTable(["a", "b", "x", "y"])
    I = Ideal(t, [parse_poly("1", t)])
    from starquiver.groebner import contains_one

    assert contains_one(I)


# ---------------------------------------------------------------------------
# cover
# ---------------------------------------------------------------------------

def test_cover_smallest_case():
    rep = verify_cover((2, 2, 2))
    assert rep.total_supports == 4096
    assert rep.counterexamples == ()
    assert rep.checked_supports == rep.covered_supports


def test_cover_next_case():
    rep = verify_cover((3, 2, 2))
    assert rep.total_supports == 16384
    assert rep.ok


def test_cover_cap_enforced():
    with pytest.raises(ValueError, match="cap"):
        verify_cover((4, 4, 4), enumeration_cap=20)
