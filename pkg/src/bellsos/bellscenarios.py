"""Bell expression library: CHSH, CGLMP(d), four tripartite facets, their
symmetry groups, and exact quantum realizations.

Everything is kept in Collins-Gisin form (per measurement the last outcome's
projector is eliminated).  Probability coefficients are converted by
expanding each joint outcome as a product of CG projector polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactfield import (ONE, ZERO, AlgebraicScalar, exact_root_of_unity,
                         rational, sqrt_rational)
from .ncalgebra import NcPolynomial, Scenario
from .symmetry import AffineAutomorphism


class ScenarioError(Exception):
    pass


class ExactModeError(Exception):
    """Raised when a realization cannot be evaluated in exact arithmetic."""


@dataclass
class BellExpression:
    """Self-adjoint Collins-Gisin polynomial with real coefficients: a
    constant delta plus single-party marginal terms plus correlators (at
    most one generator per party and monomial)."""

    scenario: Scenario
    poly: NcPolynomial
    name: str = ""
    conjectured_bound: object = None

    def __post_init__(self):
        for word in self.poly.words():
            parties = [g[0] for g in word]
            if len(set(parties)) != len(parties):
                raise ScenarioError(
                    f"not in Collins-Gisin form: repeated party in {word}")
            for g in word:
                if not self.scenario.contains(g):
                    raise ScenarioError(f"generator {g} outside scenario")
        if not self.poly.is_self_adjoint():
            raise ScenarioError("expression must be self-adjoint")

    def polynomial(self) -> NcPolynomial:
        return self.poly

    @property
    def delta(self) -> AlgebraicScalar:
        return self.poly.constant_term()

    def coefficient(self, word) -> AlgebraicScalar:
        return self.poly.coefficient(word)

    def single_party_coefficient(self, party, outcome, setting) -> AlgebraicScalar:
        return self.poly.coefficient(((party, setting, outcome),))

    def correlator_coefficient(self, gens) -> AlgebraicScalar:
        return self.poly.coefficient(tuple(sorted(gens)))

    def __str__(self):
        return str(self.poly)


def cg_outcome_polynomial(scenario: Scenario, party: int, setting: int,
                          outcome: int) -> NcPolynomial:
    """Projector of one outcome in CG form; the last outcome is
    1 - sum of the others."""
    d = scenario.outcomes
    if outcome < d - 1:
        return NcPolynomial.generator((party, setting, outcome))
    total = NcPolynomial.one()
    for a in range(d - 1):
        total = total - NcPolynomial.generator((party, setting, a))
    return total


def joint_probability_polynomial(scenario: Scenario, outcomes, settings) -> NcPolynomial:
    """P(outcomes | settings) as a CG polynomial (product over parties)."""
    total = NcPolynomial.one()
    for party, (a, x) in enumerate(zip(outcomes, settings)):
        total = total * cg_outcome_polynomial(scenario, party, x, a)
    return total


def from_probability_coefficients(coeffs, scenario: Scenario,
                                  name: str = "") -> BellExpression:
    """Bell expression sum c_{a...x...} P(a...|x...) in CG form.

    `coeffs` maps keys (a_1,...,a_p, x_1,...,x_p) over full outcome ranges
    to coefficients."""
    p = scenario.parties
    total = NcPolynomial.zero()
    for key, value in coeffs.items():
        if len(key) != 2 * p:
            raise ScenarioError(f"key {key} does not match {p} parties")
        outcomes, settings = key[:p], key[p:]
        if any(not 0 <= a < scenario.outcomes for a in outcomes) or \
           any(not 0 <= x < scenario.settings for x in settings):
            raise ScenarioError(f"key {key} outside scenario ranges")
        term = joint_probability_polynomial(scenario, outcomes, settings)
        total = total + term * AlgebraicScalar.of(Fraction(value) if not
                                                  isinstance(value, AlgebraicScalar) else value)
    return BellExpression(scenario, total, name=name)


# -- CGLMP family --------------------------------------------------------

def cglmp(d: int) -> BellExpression:
    """CGLMP inequality with two settings and d outcomes per party,
    built from the P_k/Q_k success probabilities.  The wraparound setting
    identifies A_2 with A_0 shifted by one outcome."""
    if d < 2:
        raise ScenarioError("CGLMP needs d >= 2")
    scenario = Scenario(2, 2, d)
    coeffs: dict = {}

    def add(a, b, x, y, w):
        key = (a % d, b % d, x, y)
        coeffs[key] = coeffs.get(key, Fraction(0)) + w

    for k in range(d // 2):
        w = 1 - Fraction(2 * k, d - 1)
        for shift, sign in ((k, w), (-k - 1, -w)):
            for j in range(d):
                add(j + shift, j, 0, 0, sign)       # A_0 = B_0 + shift
                add(j, j + shift, 1, 0, sign)       # B_0 = A_1 + shift
                add(j + shift, j, 1, 1, sign)       # A_1 = B_1 + shift
                add(j, j + shift + 1, 0, 1, sign)   # B_1 = (A_0 + 1) + shift
    bound = {2: rational(2) * sqrt_rational(2),
             3: ONE + sqrt_rational(Fraction(11, 3))}.get(d)
    if bound is None and d in (4, 5):
        bound = cglmp_conjectured_value(d)
    expr = from_probability_coefficients(coeffs, scenario, name=f"cglmp:{d}")
    expr.conjectured_bound = bound
    return expr


def chsh() -> BellExpression:
    e = cglmp(2)
    e.name = "chsh"
    return e


def cglmp_conjectured_value(d: int):
    """Conjectured maximal quantum value; exact for d = 2, 3, a float root
    of the known minimal polynomials for d = 4, 5."""
    if d == 2:
        return rational(2) * sqrt_rational(2)
    if d == 3:
        return ONE + sqrt_rational(Fraction(11, 3))
    if d == 4:
        g = _real_root([1, -8, 12, 24, -34, -24, 12, 8, 1], 5)
        return (-g**7 + 7 * g**6 - 4 * g**5 - 37 * g**4 + 17 * g**3
                + 51 * g**2 - 8 * g - 9) / 3
    if d == 5:
        return _real_root([5, 0, -65, 0, 144, 96, 16], 6)
    raise ScenarioError(f"no conjectured value recorded for d={d}")


def _real_root(coefficients, index_1based: int) -> float:
    import numpy as np
    roots = np.roots(coefficients)
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9)
    return real[index_1based - 1]


# -- CGLMP symmetry group ------------------------------------------------

def _sigma1_block(n: int, size: int, offset: int):
    """Identity rows except sigma_1 (x) 1_size acting at offset."""
    rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for r in range(size):
        i, j = offset + r, offset + size + r
        rows[i][i] = rows[j][j] = Fraction(0)
        rows[i][j] = rows[j][i] = Fraction(1)
    return rows


def cglmp_ambient_generators(d: int):
    """The four tree-automorphism generators omega_1..omega_4 of the
    scenario; omega_1, omega_2 permute Alice's first-setting outcomes
    (transposition / full cycle), omega_3 swaps Alice's settings, omega_4
    swaps the parties."""
    scenario = Scenario(2, 2, d)
    n = 4 * (d - 1) + 1
    cyc = [[Fraction(0)] * d for _ in range(d)]
    cyc[0][0] = Fraction(1)
    for j in range(1, d - 1):
        cyc[j][j + 1] = Fraction(1)
    cyc[d - 1][0] = Fraction(1)
    for j in range(1, d):
        cyc[d - 1][j] = Fraction(-1)
    w2_rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i in range(d):
        for j in range(d):
            w2_rows[i][j] = cyc[i][j]
    w2 = AffineAutomorphism(scenario, w2_rows)
    if d == 2:
        w1 = w2
    else:
        w1_rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        w1_rows[1][1] = w1_rows[2][2] = Fraction(0)
        w1_rows[1][2] = w1_rows[2][1] = Fraction(1)
        w1 = AffineAutomorphism(scenario, w1_rows)
    w3 = AffineAutomorphism(scenario, _sigma1_block(n, d - 1, 1))
    w4 = AffineAutomorphism(scenario, _sigma1_block(n, 2 * (d - 1), 1))
    return w1, w2, w3, w4


def _chain_reflection(d: int, c: int) -> AffineAutomorphism:
    """The involution A_{a|x} -> B_{(c-a) mod d | 1-x},
    B_{b|y} -> A_{(c-b) mod d | 1-y}, which reverses the setting chain
    A_0, B_0, A_1, B_1 that cglmp(d) is built on."""
    scenario = Scenario(2, 2, d)
    gens = scenario.generators()
    idx = {g: i + 1 for i, g in enumerate(gens)}
    n = len(gens) + 1
    rows = [[Fraction(0)] * n for _ in range(n)]
    rows[0][0] = Fraction(1)
    for g in gens:
        party, x, a = g
        i = idx[g]
        target = (1 - party, 1 - x, (c - a) % d)
        if target[2] <= d - 2:
            rows[i][idx[target]] = Fraction(1)
        else:
            rows[i][0] = Fraction(1)
            for b in range(d - 1):
                rows[i][idx[(target[0], target[1], b)]] = Fraction(-1)
    # an involution's image matrix is its own omega
    return AffineAutomorphism(scenario, rows)


def cglmp_symmetry_generators(d: int):
    """Generators (a, x) of the dihedral group of order 8d leaving cglmp(d)
    invariant: a = omega_2 omega_3 omega_4 is the order-4d rotation and x is
    a chain-reversing reflection.  Reflections come in two conjugacy classes
    (x versus x*a); the representative is fixed per d so that the sign
    character appearing in the moment-matrix decomposition is the recorded
    one for every d."""
    if not 2 <= d <= 5:
        raise ScenarioError(f"symmetry generators only validated for "
                            f"2 <= d <= 5, got {d}")
    omegas = cglmp_ambient_generators(d)
    a = omegas[1] * omegas[2] * omegas[3]
    x = _chain_reflection(d, 0 if d == 2 else 1)
    if d >= 4:
        x = x * a
    return a, x


# -- Tripartite facets ---------------------------------------------------

_SLIWA_TERMS = {
    # (word of (party, setting, outcome) triples) -> integer coefficient;
    # settings already 0-based.  A=0, B=1, C=2; all outcomes 0.
    3: {
        (): -2,
        ((0, 0, 0),): 4, ((1, 0, 0),): 4, ((2, 0, 0),): 4,
        ((0, 0, 0), (1, 0, 0)): -8,
        ((0, 0, 0), (2, 0, 0)): -4, ((0, 0, 0), (2, 1, 0)): -4,
        ((0, 1, 0), (2, 0, 0)): -4, ((0, 1, 0), (2, 1, 0)): 4,
        ((1, 0, 0), (2, 0, 0)): -4, ((1, 1, 0), (2, 0, 0)): -4,
        ((1, 0, 0), (2, 1, 0)): -4, ((1, 1, 0), (2, 1, 0)): 4,
        ((0, 0, 0), (1, 0, 0), (2, 0, 0)): 8,
        ((0, 0, 0), (1, 0, 0), (2, 1, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 0, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 1, 0)): -8,
    },
    10: {
        (): 4,
        ((1, 1, 0),): -8, ((2, 0, 0),): -8,
        ((0, 1, 0), (1, 0, 0)): -8, ((0, 1, 0), (1, 1, 0)): 8,
        ((0, 1, 0), (2, 0, 0)): 8, ((0, 1, 0), (2, 1, 0)): -8,
        ((1, 1, 0), (2, 0, 0)): 8, ((1, 1, 0), (2, 1, 0)): 8,
        ((0, 0, 0), (1, 0, 0), (2, 0, 0)): 8,
        ((0, 1, 0), (1, 0, 0), (2, 1, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 0, 0)): -8,
        ((0, 0, 0), (1, 1, 0), (2, 1, 0)): -8,
    },
    11: {
        (): -4,
        ((1, 1, 0),): 8, ((2, 1, 0),): 8,
        ((0, 0, 0), (1, 0, 0)): 8, ((0, 0, 0), (1, 1, 0)): -8,
        ((0, 1, 0), (2, 0, 0)): 8, ((0, 1, 0), (2, 1, 0)): -8,
        ((1, 1, 0), (2, 1, 0)): -16,
        ((0, 0, 0), (1, 0, 0), (2, 0, 0)): -8,
        ((0, 1, 0), (1, 0, 0), (2, 0, 0)): -8,
        ((0, 0, 0), (1, 0, 0), (2, 1, 0)): -8,
        ((0, 1, 0), (1, 0, 0), (2, 1, 0)): 8,
        ((0, 0, 0), (1, 1, 0), (2, 0, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 0, 0)): -8,
        ((0, 0, 0), (1, 1, 0), (2, 1, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 1, 0)): 8,
    },
    14: {
        (): 4,
        ((1, 0, 0),): -8, ((2, 0, 0),): -8,
        ((0, 1, 0), (2, 0, 0)): 8, ((0, 1, 0), (2, 1, 0)): -8,
        ((1, 0, 0), (2, 0, 0)): 8, ((1, 0, 0), (2, 1, 0)): 8,
        ((0, 0, 0), (1, 1, 0), (2, 0, 0)): 8,
        ((0, 1, 0), (1, 1, 0), (2, 0, 0)): -8,
        ((0, 0, 0), (1, 1, 0), (2, 1, 0)): -8,
        ((0, 1, 0), (1, 1, 0), (2, 1, 0)): 8,
    },
}

_SLIWA_BOUNDS = {
    3: rational(2) * sqrt_rational(2),
    10: rational(4),
    11: rational(4) * sqrt_rational(2),
    14: rational(4) * sqrt_rational(2),
}


def sliwa(index: int) -> BellExpression:
    """One of the four tripartite facet inequalities shipped with exact
    almost-quantum certificates (3, 10, 11, 14); setting labels 0-based."""
    if index not in _SLIWA_TERMS:
        raise ScenarioError(f"facet {index} not in supported set "
                            f"{sorted(_SLIWA_TERMS)}")
    scenario = Scenario(3, 2, 2)
    poly = NcPolynomial({w: Fraction(c) for w, c in _SLIWA_TERMS[index].items()})
    return BellExpression(scenario, poly, name=f"sliwa:{index}",
                          conjectured_bound=_SLIWA_BOUNDS[index])


def deterministic_value(expression: BellExpression, assignment) -> AlgebraicScalar:
    """Evaluate under a local deterministic strategy; `assignment` maps
    (party, setting) to the chosen outcome."""
    total = ZERO
    for word, coeff in expression.poly.terms().items():
        value = coeff
        for (party, setting, outcome) in word:
            if assignment[(party, setting)] != outcome:
                value = ZERO
                break
        total = total + value
    return total


# -- Quantum realizations ------------------------------------------------

def _phase_projector_exact(d: int, outcome, phase: Fraction):
    """|v><v| for |v> = (1/sqrt d) sum_k exp(2 pi i k (outcome + phase)/d)|k>,
    exactly; entries (k,l) are roots of unity / d."""
    inv_d = rational(1, d)
    entries = []
    for k in range(d):
        row = []
        for l in range(d):
            arg = Fraction(outcome) + phase
            num = (k - l) * arg.numerator
            den = d * arg.denominator
            f = Fraction(num, den)
            row.append(exact_root_of_unity(f.numerator, f.denominator) * inv_d)
        entries.append(row)
    return entries


def _phase_projector_numeric(d: int, outcome, phase: float):
    import numpy as np
    k = np.arange(d)
    v = np.exp(2j * math.pi * k * (outcome + phase) / d) / math.sqrt(d)
    return np.outer(v, v.conj())


ALICE_PHASES = (Fraction(1, 2), Fraction(0))
BOB_PHASES = (Fraction(-1, 4), Fraction(1, 4))


@dataclass
class QuantumRealization:
    """Schmidt-form state (unnormalized coefficients) plus per-party
    projective measurements given as explicit matrices over the field
    (exact) or complex arrays (numeric)."""

    scenario: Scenario
    state: list
    projectors: list  # [party][setting][outcome] -> matrix
    exact: bool = True

    def norm_squared(self):
        if self.exact:
            return sum((c.conj() * c for c in self.state),
                       ZERO)
        return float(sum(abs(c) ** 2 for c in self.state))


def cglmp_realization(d: int) -> QuantumRealization:
    """The conjectured optimal state and phase measurements; exact for
    d = 2, 3, numeric above (the d >= 4 Schmidt coefficients are roots of
    polynomials that no square-root tower contains)."""
    scenario = Scenario(2, 2, d)
    exact = d in (2, 3)
    if d == 2:
        state = [ONE, ONE]
    elif d == 3:
        gamma3 = (sqrt_rational(11) - sqrt_rational(3)) * rational(1, 2)
        state = [ONE, gamma3, ONE]
    elif d == 4:
        g = _real_root([1, -8, 12, 24, -34, -24, 12, 8, 1], 5)
        state = [1.0, g, g, 1.0]
    elif d == 5:
        g1 = _real_root([1, 0, -67, 0, 294, 0, -443, 0, 286, 0, -75, 0, 5], 8)
        g2 = _real_root([1, -14, -6, 52, -4, -40, 16], 4)
        state = [1.0, g1, g2, g1, 1.0]
    else:
        raise ScenarioError(f"no recorded optimal state for d={d}")
    projs = []
    for party, phases in enumerate((ALICE_PHASES, BOB_PHASES)):
        party_list = []
        for x in range(2):
            setting_list = []
            for a in range(d):
                outcome = a if party == 0 else -a
                if exact:
                    setting_list.append(
                        _phase_projector_exact(d, outcome, phases[x]))
                else:
                    setting_list.append(
                        _phase_projector_numeric(d, outcome, float(phases[x])))
            party_list.append(setting_list)
        projs.append(party_list)
    return QuantumRealization(scenario, state, projs, exact=exact)


def _word_operator(realization: QuantumRealization, word, party: int):
    letters = [g for g in word if g[0] == party]
    d = realization.scenario.outcomes
    if realization.exact:
        from .linalg import identity, mat_mul
        op = identity(d)
        for (_, x, a) in letters:
            op = mat_mul(op, realization.projectors[party][x][a])
        return op
    import numpy as np
    op = np.eye(d, dtype=complex)
    for (_, x, a) in letters:
        op = op @ realization.projectors[party][x][a]
    return op


def realization_moments(realization: QuantumRealization, basis,
                        numeric: bool = False):
    """Exact moments <psi| M_k |psi> for each polynomial in `basis`.

    With numeric=True, float moments are returned instead (the only option
    for realizations flagged exact=False)."""
    if not realization.exact and not numeric:
        raise ExactModeError(
            "exact mode unsupported: realization entries lie outside the "
            "square-root towers; pass numeric=True for a float evaluation")
    polys = [b.polynomial() if hasattr(b, "polynomial") else b for b in basis]
    cache: dict = {}
    out = []
    if numeric:
        state = [complex(s) if not isinstance(s, AlgebraicScalar)
                 else complex(_to_c(s)) for s in realization.state]
        nrm = sum(abs(c) ** 2 for c in state)
        numeric_real = realization if not realization.exact else \
            _numeric_view(realization)
        for p in polys:
            total = 0j
            for word, coeff in p.terms().items():
                if word not in cache:
                    ma = _word_operator(numeric_real, word, 0)
                    mb = _word_operator(numeric_real, word, 1)
                    val = 0j
                    for j, cj in enumerate(state):
                        for k, ck in enumerate(state):
                            val += cj.conjugate() * ck * ma[j][k] * mb[j][k]
                    cache[word] = val / nrm
                total += complex(_to_c(coeff)) * cache[word]
            out.append(total.real if abs(total.imag) < 1e-9 else total)
        return out
    nrm = realization.norm_squared()
    nrm_inv = nrm.inverse()
    for p in polys:
        total = ZERO
        for word, coeff in p.terms().items():
            if word not in cache:
                ma = _word_operator(realization, word, 0)
                mb = _word_operator(realization, word, 1)
                val = ZERO
                for j, cj in enumerate(realization.state):
                    for k, ck in enumerate(realization.state):
                        f = cj.conj() * ck
                        if not f.is_zero():
                            val = val + f * ma[j][k] * mb[j][k]
                cache[word] = val * nrm_inv
            total = total + coeff * cache[word]
        out.append(total)
    return out


def _to_c(s: AlgebraicScalar) -> complex:
    from .exactfield import to_float
    return complex(to_float(s))


def _numeric_view(realization: QuantumRealization) -> QuantumRealization:
    import numpy as np
    projs = []
    for party_list in realization.projectors:
        projs.append([[np.array([[_to_c(e) for e in row] for row in proj])
                       for proj in setting] for setting in party_list])
    state = [_to_c(c) for c in realization.state]
    return QuantumRealization(realization.scenario, state, projs, exact=False)
