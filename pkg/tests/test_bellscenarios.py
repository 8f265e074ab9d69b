import itertools
import random
from fractions import Fraction

import pytest

from bellsos.bellscenarios import (
    ALICE_PHASES, BOB_PHASES, BellExpression, ExactModeError, ScenarioError,
    cglmp, cglmp_ambient_generators, cglmp_conjectured_value,
    cglmp_realization, cglmp_symmetry_generators, chsh, deterministic_value,
    from_probability_coefficients, joint_probability_polynomial,
    realization_moments, sliwa,
)
from bellsos.exactfield import ONE, ZERO, rational, sqrt_rational
from bellsos.linalg import identity, mat_eq, mat_mul, is_zero_matrix, mat_sub
from bellsos.ncalgebra import NcPolynomial, Scenario, parse_polynomial
from bellsos.symmetry import closure, check_invariance

CHSH_CG = ("(2/1) + (-4/1) A0|1 + (-4/1) B0|0 + (4/1) A0|0 B0|0 + "
           "(-4/1) A0|0 B0|1 + (4/1) A0|1 B0|0 + (4/1) A0|1 B0|1")

CGLMP3_CG = (
    "(2/1) + (-3/1) A0|1 + (-3/1) A1|1 + (-3/1) B0|0 + (-3/1) B1|0 + "
    "(3/1) A0|1 B0|0 + (3/1) A0|1 B0|1 + (3/1) A0|1 B1|0 + "
    "(3/1) A0|0 B0|0 + (3/1) A1|0 B0|0 + (-3/1) A0|0 B0|1 + "
    "(-3/1) A1|0 B0|1 + (3/1) A1|1 B0|1 + (3/1) A1|0 B1|0 + "
    "(3/1) A1|1 B1|0 + (-3/1) A1|0 B1|1 + (3/1) A1|1 B1|1")

CGLMP4_CG = (
    "(2/1) + (-8/3) A0|1 + (-8/3) A1|1 + (-8/3) A2|1 + "
    "(-8/3) B0|0 + (-8/3) B1|0 + (-8/3) B2|0 + "
    "(8/3) A0|1 B0|0 + (8/3) A0|1 B0|1 + (8/3) A0|1 B1|0 + (8/3) A0|1 B2|0 + "
    "(8/3) A0|0 B0|0 + (8/3) A1|0 B0|0 + (8/3) A2|0 B0|0 + "
    "(-8/3) A0|0 B0|1 + (-8/3) A1|0 B0|1 + (8/3) A1|1 B0|1 + "
    "(-8/3) A2|0 B0|1 + (8/3) A2|1 B0|1 + "
    "(8/3) A1|0 B1|0 + (8/3) A1|1 B1|0 + (8/3) A2|0 B1|0 + "
    "(-8/3) A1|0 B1|1 + (8/3) A1|1 B1|1 + (-8/3) A2|0 B1|1 + "
    "(8/3) A2|1 B1|1 + "
    "(8/3) A1|1 B2|0 + (8/3) A2|0 B2|0 + (8/3) A2|1 B2|0 + "
    "(-8/3) A2|0 B2|1 + (8/3) A2|1 B2|1")


def test_chsh_collins_gisin_form():
    assert chsh().polynomial() == parse_polynomial(CHSH_CG)


def test_cglmp3_collins_gisin_form():
    assert cglmp(3).polynomial() == parse_polynomial(CGLMP3_CG)


def test_cglmp4_collins_gisin_form():
    assert cglmp(4).polynomial() == parse_polynomial(CGLMP4_CG)


def test_expressions_self_adjoint():
    exprs = [chsh(), cglmp(3), cglmp(4), cglmp(5),
             sliwa(3), sliwa(10), sliwa(11), sliwa(14)]
    for e in exprs:
        assert e.polynomial().adjoint() == e.polynomial()


def test_from_probability_coefficients_trivia():
    sc = Scenario(2, 2, 2)
    zero = from_probability_coefficients({}, sc)
    assert zero.polynomial().is_zero()
    single = from_probability_coefficients({(0, 0, 0, 0): 1}, sc)
    assert single.polynomial() == NcPolynomial.monomial(
        ((0, 0, 0), (1, 0, 0)))
    assert single.delta == ZERO


def test_from_probability_coefficients_errors():
    sc = Scenario(2, 2, 2)
    with pytest.raises(ScenarioError):
        from_probability_coefficients({(0, 0, 0): 1}, sc)
    with pytest.raises(ScenarioError):
        from_probability_coefficients({(0, 2, 0, 0): 1}, sc)


def test_cg_conversion_agrees_on_deterministic_strategies():
    # evaluating the raw probability combination and its CG rewrite on
    # every local deterministic assignment must give the same value
    rng = random.Random(7)
    sc = Scenario(2, 2, 2)
    coeffs = {key: rng.randint(-5, 5)
              for key in itertools.product(range(2), range(2), range(2), range(2))}
    expr = from_probability_coefficients(coeffs, sc)
    for values in itertools.product(range(2), repeat=4):
        assignment = {(0, 0): values[0], (0, 1): values[1],
                      (1, 0): values[2], (1, 1): values[3]}
        direct = sum(c for (a, b, x, y), c in coeffs.items()
                     if assignment[(0, x)] == a and assignment[(1, y)] == b)
        assert deterministic_value(expr, assignment) == rational(direct)


def test_chsh_local_bound():
    expr = chsh()
    best = max(
        deterministic_value(expr, {(0, 0): v[0], (0, 1): v[1],
                                   (1, 0): v[2], (1, 1): v[3]}).to_fraction()
        for v in itertools.product(range(2), repeat=4))
    assert best == 2


def test_sliwa_constants_and_errors():
    assert sliwa(3).delta == rational(-2)
    assert sliwa(10).delta == rational(4)
    assert sliwa(11).delta == rational(-4)
    assert sliwa(14).delta == rational(4)
    with pytest.raises(ScenarioError):
        sliwa(1)


def test_sliwa_three_party_words():
    e = sliwa(10)
    assert e.scenario == Scenario(3, 2, 2)
    assert e.coefficient(((0, 0, 0), (1, 0, 0), (2, 0, 0))) == rational(8)
    assert e.single_party_coefficient(2, 0, 0) == rational(-8)
    # every word touches each party at most once
    for word in e.polynomial().words():
        parties = [g[0] for g in word]
        assert len(set(parties)) == len(parties)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_symmetry_generators_validate(d):
    a, x = cglmp_symmetry_generators(d)
    p = cglmp(d).polynomial()
    assert a.apply(p) == p
    assert x.apply(p) == p
    assert (a ** (4 * d)).is_identity()
    assert (x * x).is_identity()
    assert (x * a * x * a).is_identity()
    assert closure([a, x]).order == 8 * d


def test_symmetry_generators_unsupported_d():
    with pytest.raises(ScenarioError):
        cglmp_symmetry_generators(6)


def test_full_group_invariance_small_d():
    for d in (2, 3):
        group = closure(list(cglmp_symmetry_generators(d)))
        assert check_invariance(cglmp(d), group)


def test_ambient_group_order_d2():
    group = closure(list(cglmp_ambient_generators(2)), max_order=200)
    assert group.order == 128


def test_realization_projector_relations_exact():
    for d in (2, 3):
        r = cglmp_realization(d)
        eye = identity(d)
        for party in range(2):
            for x in range(2):
                projs = r.projectors[party][x]
                total = [[ZERO] * d for _ in range(d)]
                for p in projs:
                    for i in range(d):
                        for j in range(d):
                            total[i][j] = total[i][j] + p[i][j]
                assert mat_eq(total, eye)
                for i, p in enumerate(projs):
                    assert mat_eq(mat_mul(p, p), p)
                    for q in projs[i + 1:]:
                        assert is_zero_matrix(mat_mul(p, q))


def test_realization_moment_normalization():
    for d in (2, 3):
        r = cglmp_realization(d)
        assert realization_moments(r, [NcPolynomial.one()]) == [ONE]


def test_realization_pvm_moment_relation():
    r = cglmp_realization(3)
    gen = NcPolynomial.generator((0, 0, 0))
    sq, single = realization_moments(r, [gen * gen, gen])
    assert sq == single


def test_chsh_realization_value():
    r = cglmp_realization(2)
    value = realization_moments(r, [chsh()])[0]
    assert value == rational(2) * sqrt_rational(2)


def test_cglmp3_realization_value():
    r = cglmp_realization(3)
    value = realization_moments(r, [cglmp(3)])[0]
    assert value == ONE + sqrt_rational(Fraction(11, 3))


def test_exact_mode_refusal_d4():
    r = cglmp_realization(4)
    assert not r.exact
    with pytest.raises(ExactModeError, match="exact mode unsupported"):
        realization_moments(r, [cglmp(4)])


@pytest.mark.parametrize("d,target", [(4, 2.9727), (5, 3.0157)])
def test_numeric_realization_matches_conjecture(d, target):
    r = cglmp_realization(d)
    value = realization_moments(r, [cglmp(d)], numeric=True)[0]
    conj = cglmp_conjectured_value(d)
    assert abs(value - conj) < 1e-9
    assert abs(value - target) < 1e-3


def test_numeric_agrees_with_exact_d3():
    r = cglmp_realization(3)
    exact = realization_moments(r, [cglmp(3)])[0]
    numeric = realization_moments(r, [cglmp(3)], numeric=True)[0]
    from bellsos.exactfield import to_real_float
    assert abs(numeric - to_real_float(exact)) < 1e-12


def test_conjectured_values():
    assert cglmp_conjectured_value(2) == rational(2) * sqrt_rational(2)
    assert cglmp_conjectured_value(3) == ONE + sqrt_rational(Fraction(11, 3))
    assert abs(cglmp_conjectured_value(4) - 2.9727) < 1e-3
    assert abs(cglmp_conjectured_value(5) - 3.0157) < 1e-3


def test_phase_constants():
    assert ALICE_PHASES == (Fraction(1, 2), Fraction(0))
    assert BOB_PHASES == (Fraction(-1, 4), Fraction(1, 4))


def test_collins_gisin_range_enforced():
    sc = Scenario(2, 2, 2)
    # a generator with outcome d-1 would not be a CG coordinate
    with pytest.raises(Exception):
        BellExpression(sc, NcPolynomial.generator((0, 0, 5)))


def test_joint_probability_normalization():
    # summing P(ab|xy) over all outcomes gives 1 for each setting pair
    sc = Scenario(2, 2, 3)
    for x in range(2):
        for y in range(2):
            total = NcPolynomial.zero()
            for a in range(3):
                for b in range(3):
                    total = total + joint_probability_polynomial(sc, (a, b), (x, y))
            assert total == NcPolynomial.one()
