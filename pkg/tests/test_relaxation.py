import pytest

from bellsos.bellscenarios import chsh, cglmp, cglmp_symmetry_generators, sliwa
from bellsos.exactfield import I_UNIT, ONE, ZERO, AlgebraicScalar, rational
from bellsos.linalg import freeze, mat_eq, mat_mul, transpose
from bellsos.ncalgebra import (
    NcPolynomial, Scenario, parse_polynomial, serialize_polynomial,
)
from bellsos.relaxation import (
    GeneratingSequence, MomentStructure, RelaxationError, SymmetrizedMoments,
    average_polynomial, build_moment_structure, dense_matrix,
    generating_sequence, reconstructed_xi, symmetrize_moments,
)
from bellsos.symmetry import closure, conjugation_reduction, representation_on


def chsh_setup():
    expr = chsh()
    seq = generating_sequence(expr.scenario, 1)
    return expr, seq, build_moment_structure(expr, seq)


def chsh_group():
    return closure(list(cglmp_symmetry_generators(2)))


# -- generating sequences -------------------------------------------------

def test_sequence_lengths():
    assert len(generating_sequence(Scenario(2, 2, 2), 1)) == 5
    assert len(generating_sequence(Scenario(2, 2, 3), "1+AB")) == 25
    assert len(generating_sequence(Scenario(2, 2, 4), "1+AB")) == 49
    assert len(generating_sequence(Scenario(2, 2, 5), "1+AB")) == 81
    assert len(generating_sequence(Scenario(3, 2, 2), "local:3")) == 27
    assert len(generating_sequence(Scenario(3, 2, 2), "local:2")) == 19


def test_sequence_chsh_level1_entries():
    seq = generating_sequence(Scenario(2, 2, 2), 1)
    want = ["(1/1)", "A0|0", "A0|1", "B0|0", "B0|1"]
    assert [serialize_polynomial(q) for q in seq] == want
    assert seq.tag == "level-1"


def test_sequence_1ab_order():
    seq = generating_sequence(Scenario(2, 2, 2), "1+AB")
    got = [serialize_polynomial(q) for q in seq]
    assert got[:5] == ["(1/1)", "A0|0", "A0|1", "B0|0", "B0|1"]
    assert got[5:] == ["A0|0 B0|0", "A0|0 B0|1", "A0|1 B0|0", "A0|1 B0|1"]


def test_sequence_1ab_needs_two_parties():
    with pytest.raises(RelaxationError, match="two parties"):
        generating_sequence(Scenario(3, 2, 2), "1+AB")


def test_sequence_bad_level():
    with pytest.raises(RelaxationError):
        generating_sequence(Scenario(2, 2, 2), "level-9")
    with pytest.raises(RelaxationError):
        generating_sequence(Scenario(2, 2, 2), "local:7")


def test_custom_sequence_accepts_strings():
    seq = generating_sequence(Scenario(2, 2, 2), ["(1/1)", "A0|0", "B0|1"])
    assert len(seq) == 3
    assert seq.tag == "custom"


def test_custom_sequence_must_start_with_one():
    with pytest.raises(RelaxationError, match="must be 1"):
        generating_sequence(Scenario(2, 2, 2), ["A0|0", "B0|1"])


def test_custom_sequence_dependency_reported():
    with pytest.raises(RelaxationError, match="entry 3"):
        generating_sequence(
            Scenario(2, 2, 2),
            ["(1/1)", "A0|0", "B0|0", "(1/2) A0|0 + (1/2) B0|0"])


def test_custom_sequence_foreign_generator():
    with pytest.raises(RelaxationError, match="outside the scenario"):
        generating_sequence(Scenario(2, 2, 2), ["(1/1)", "C0|0"])


# -- moment structure ------------------------------------------------------

def test_chsh_moment_basis_cardinality():
    _, _, ms = chsh_setup()
    assert len(ms.basis) == 13
    assert ms.basis[0] == NcPolynomial.one()
    assert all(m.is_self_adjoint() for m in ms.basis)


def test_chsh_moment_basis_elements():
    _, _, ms = chsh_setup()
    a00a01 = parse_polynomial("A0|0 A0|1")
    a01a00 = parse_polynomial("A0|1 A0|0")
    assert ms.basis[1] == parse_polynomial("A0|0")
    assert ms.basis[4] == parse_polynomial("B0|1")
    assert ms.basis[5] == a00a01 + a01a00
    assert ms.basis[6] == (a00a01 - a01a00) * I_UNIT
    assert ms.basis[9] == parse_polynomial("A0|0 B0|0")
    assert ms.basis[10] == parse_polynomial("A0|0 B0|1")
    assert ms.basis[11] == parse_polynomial("A0|1 B0|0")
    assert ms.basis[12] == parse_polynomial("A0|1 B0|1")


def test_chsh_objective_vector():
    _, _, ms = chsh_setup()
    assert ms.b0 == AlgebraicScalar.of(2)
    want = [0, -4, -4, 0, 0, 0, 0, 0, 4, -4, 4, 4]
    assert ms.b == [AlgebraicScalar.of(v) for v in want]


def test_chsh_coefficient_matrix_entries():
    _, _, ms = chsh_setup()
    half = rational(1, 2)
    assert ms.A[1] == {(0, 1): ONE, (1, 0): ONE, (1, 1): ONE}
    assert ms.A[5] == {(1, 2): half, (2, 1): half}
    assert ms.A[6] == {(1, 2): -I_UNIT * half, (2, 1): I_UNIT * half}
    assert ms.A[7] == {(3, 4): half, (4, 3): half}
    assert ms.A[9] == {(1, 3): ONE, (3, 1): ONE}
    assert ms.A[12] == {(2, 4): ONE, (4, 2): ONE}


def test_coefficient_matrices_hermitian():
    for ms in [chsh_setup()[2],
               build_moment_structure(
                   cglmp(3), generating_sequence(Scenario(2, 2, 3), "1+AB"))]:
        for ak in ms.A:
            for (i, j), c in ak.items():
                assert ak[(j, i)] == c.conj()


def test_xi_is_hermitian():
    _, _, ms = chsh_setup()
    n = ms.size
    for i in range(n):
        for j in range(n):
            assert ms.xi[j][i] == ms.xi[i][j].adjoint()


def test_xi_reconstruction_chsh():
    _, _, ms = chsh_setup()
    rec = reconstructed_xi(ms)
    assert all(rec[i][j] == ms.xi[i][j]
               for i in range(ms.size) for j in range(ms.size))


def test_xi_reconstruction_cglmp3():
    ms = build_moment_structure(
        cglmp(3), generating_sequence(Scenario(2, 2, 3), "1+AB"))
    assert len(ms.basis) == 169
    rec = reconstructed_xi(ms)
    assert all(rec[i][j] == ms.xi[i][j]
               for i in range(ms.size) for j in range(ms.size))


def test_moment_counts_match_tables():
    ms2 = build_moment_structure(
        cglmp(2), generating_sequence(Scenario(2, 2, 2), "1+AB"))
    assert len(ms2.basis) == 25
    ms4 = build_moment_structure(
        cglmp(4), generating_sequence(Scenario(2, 2, 4), "1+AB"))
    assert len(ms4.basis) == 625


def test_objective_outside_span():
    expr = sliwa(10)
    seq = generating_sequence(Scenario(3, 2, 2), 1)
    with pytest.raises(RelaxationError, match="missing monomials"):
        build_moment_structure(expr, seq)


def test_scenario_mismatch_rejected():
    with pytest.raises(RelaxationError, match="different scenarios"):
        build_moment_structure(
            chsh(), generating_sequence(Scenario(2, 2, 3), 1))


# -- symmetrization --------------------------------------------------------

def test_symmetrize_chsh_reduced_basis():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g, representation_on(seq, g))
    assert len(sm.basis) == 2
    want = ("A0|1 + B0|0 + (-1/1) A0|0 B0|0 + A0|0 B0|1 + "
            "(-1/1) A0|1 B0|0 + (-1/1) A0|1 B0|1")
    assert serialize_polynomial(sm.basis[1]) == want
    assert sm.tilde_basis is sm.basis
    assert sm.Aprime is sm.A


def test_symmetrize_chsh_objective():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g)
    assert sm.b0 == AlgebraicScalar.of(2)
    assert sm.b == [AlgebraicScalar.of(-4)]
    assert sm.tilde_b0 == sm.b0 and sm.tilde_b is sm.b


def test_symmetrize_chsh_w_vector():
    _, seq, ms = chsh_setup()
    sm = symmetrize_moments(ms, chsh_group())
    half = rational(1, 2)
    assert sm.w[:4] == [half, half, half, half]
    assert all(c.is_zero() for row in sm.W[:4] for c in row)
    # every single-party moment averages to the constant 1/2


def test_symmetrized_moment_relation():
    # averaged original moments reconstruct as w + W * (reduced moments)
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g)
    for k, mk in enumerate(ms.basis[1:]):
        bar = average_polynomial(mk, g)
        rhs = NcPolynomial.constant(sm.w[k])
        for ell, mt in enumerate(sm.basis[1:]):
            rhs = rhs + mt * sm.W[k][ell]
        assert bar == rhs


def test_symmetrize_objective_invariance():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g)
    lhs = NcPolynomial.constant(ms.b0)
    for bk, mk in zip(ms.b, ms.basis[1:]):
        lhs = lhs + average_polynomial(mk, g) * bk
    rhs = NcPolynomial.constant(sm.b0)
    for bl, mt in zip(sm.b, sm.basis[1:]):
        rhs = rhs + mt * bl
    assert lhs == rhs


def test_symmetrize_matrix_identity():
    # A0 + sum_k A_k Mbar_k == A'_0 + sum_l A'_l Mtilde_l entrywise
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g)
    n = ms.size
    lhs = [[NcPolynomial.zero() for _ in range(n)] for _ in range(n)]
    for k, ak in enumerate(ms.A):
        mk = ms.basis[k] if k == 0 else average_polynomial(ms.basis[k], g)
        for (i, j), c in ak.items():
            lhs[i][j] = lhs[i][j] + mk * c
    rhs = reconstructed_xi(sm)
    assert all(lhs[i][j] == rhs[i][j] for i in range(n) for j in range(n))
    assert all(sm.xi[i][j] == rhs[i][j] for i in range(n) for j in range(n))


def test_aprime_invariance_under_group():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    rho = representation_on(seq, g)
    sm = symmetrize_moments(ms, g, rho)
    idx = g.element_index()
    n = ms.size
    for gen in g.generators:
        r = rho.images[idx[gen]]
        rdag = transpose([[c.conj() for c in row] for row in r])
        for ap in sm.A:
            mat = dense_matrix(ap, n)
            assert mat_eq(mat_mul(mat_mul(r, mat), rdag), mat)


def test_averaging_idempotent():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    sm = symmetrize_moments(ms, g)
    again = symmetrize_moments(sm, g, sm.rho)
    assert again.basis == sm.basis
    assert all(c.is_zero() for c in again.w)
    assert again.W == [[ONE]]
    assert again.b0 == sm.b0 and again.b == sm.b


def test_symmetrize_closure_error():
    seq = generating_sequence(Scenario(2, 2, 2), ["(1/1)", "A0|0"])
    ms = build_moment_structure(parse_polynomial("A0|0"), seq)
    with pytest.raises(Exception, match="not closed"):
        symmetrize_moments(ms, chsh_group())


def test_representation_mismatch_detected():
    _, seq, ms = chsh_setup()
    g = chsh_group()
    rho = representation_on(seq, g)
    swapped = list(rho.images)
    swapped[1], swapped[2] = swapped[2], swapped[1]
    bad = type(rho)(rho.group, swapped)
    with pytest.raises(RelaxationError, match="inconsistent"):
        symmetrize_moments(ms, g, bad)


def test_cglmp3_symmetrized_cardinality():
    expr = cglmp(3)
    seq = generating_sequence(expr.scenario, "1+AB")
    ms = build_moment_structure(expr, seq)
    g = closure(list(cglmp_symmetry_generators(3)))
    sm = symmetrize_moments(ms, g, representation_on(seq, g))
    assert len(sm.basis) == 11
    assert sm.b0 == AlgebraicScalar.of(2)
    assert all(p.is_self_adjoint() for p in sm.basis)
    assert all(c.conj() == c for row in sm.W for c in row)


# -- conjugation reduction -------------------------------------------------

def test_conjugation_reduction_chsh():
    _, _, ms = chsh_setup()
    red = conjugation_reduction(ms)
    assert red.conjugation_reduced
    assert len(red.basis) == 11
    dropped = [m for m in ms.basis if all(m != k for k in red.basis)]
    assert dropped == [ms.basis[6], ms.basis[8]]
    assert red.b == [c for k, c in enumerate(ms.b) if k not in (5, 7)]
    rec = reconstructed_xi(red)
    assert all(rec[i][j] == red.xi[i][j]
               for i in range(red.size) for j in range(red.size))


def test_conjugation_reduction_symmetrized_keeps_w_columns():
    _, seq, ms = chsh_setup()
    sm = symmetrize_moments(ms, chsh_group())
    red = conjugation_reduction(sm)
    assert red.conjugation_reduced
    assert len(red.basis) == len(sm.basis)
    assert red.W == sm.W
