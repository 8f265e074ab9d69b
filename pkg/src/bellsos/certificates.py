"""Exact certificate machinery for the sum-of-squares side.

LDL factorization without square roots, all-subsets principal-minor PSD
tests, rounding of numeric SDP solutions into exactly re-verified block
solutions, complementarity pinning against a conjectured exact dual
optimum, sum-of-squares extraction, and fully symbolic verification of the
resulting identity mu - E = sum_l weight_l * (poly_l)* (poly_l) in the
quotient ring.  Weights are kept unsquare-rooted (D entries), so everything
stays inside the scalar field.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .exactfield import (ONE, ZERO, AlgebraicScalar, FieldError, FieldTower,
                         parse_scalar, rational, recognize, serialize,
                         to_float)
from .linalg import freeze, mat_mul, matrix, nullspace, trace, zeros
from .ncalgebra import (NcPolynomial, ParseError, Scenario, parse_polynomial,
                        serialize_polynomial)


class CertificateError(Exception):
    pass


def _sign(v: AlgebraicScalar) -> int:
    if v.is_zero():
        return 0
    x = to_float(v, 212)
    return 1 if x.real > 0 else -1


def _check_hermitian(m) -> None:
    n = len(m)
    for i in range(n):
        for j in range(i, n):
            if not (m[i][j] - m[j][i].conj()).is_zero():
                raise CertificateError(
                    f"matrix is not Hermitian at entry ({i},{j})")


def ldl(m):
    """Exact factorization M = L D L^dag of a Hermitian PSD matrix.

    L is n x r with one unit-pivot column per nonzero diagonal pivot taken
    in natural order, D the tuple of the r positive pivots (r = rank M).
    Raises on the first certificate of indefiniteness: a negative pivot, or
    a zero pivot whose residual column is nonzero."""
    n = len(m)
    _check_hermitian(m)
    a = [[m[i][j] for j in range(n)] for i in range(n)]
    cols, dvals = [], []
    for k in range(n):
        piv = a[k][k]
        if piv.is_zero():
            if any(not a[i][k].is_zero() for i in range(k + 1, n)):
                raise CertificateError(
                    f"not positive semidefinite: zero pivot at index {k} "
                    "with a nonzero residual column")
            continue
        if _sign(piv) < 0:
            raise CertificateError(
                "not positive semidefinite: the leading principal minor on "
                f"indices 0..{k} is negative (pivot {serialize(piv)})")
        inv = piv.inverse()
        col = [ZERO] * n
        col[k] = ONE
        for i in range(k + 1, n):
            col[i] = a[i][k] * inv
        for i in range(k + 1, n):
            if col[i].is_zero():
                continue
            fi = col[i] * piv
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - fi * col[j].conj()
        cols.append(col)
        dvals.append(piv)
    lmat = freeze([[c[i] for c in cols] for i in range(n)])
    return lmat, tuple(dvals)


def _det(m) -> AlgebraicScalar:
    a = [list(row) for row in m]
    n = len(a)
    det = ONE
    flip = False
    for k in range(n):
        piv = next((i for i in range(k, n) if not a[i][k].is_zero()), None)
        if piv is None:
            return ZERO
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            flip = not flip
        det = det * a[k][k]
        inv = a[k][k].inverse()
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            f = a[i][k] * inv
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return -det if flip else det


def psd_check_minors(m) -> bool:
    """All-subsets principal minor test, exact.

    Leading minors alone certify positive definiteness only; for possibly
    singular matrices every principal minor must be nonnegative (e.g.
    diag(0, -1) has all leading minors zero)."""
    n = len(m)
    try:
        _check_hermitian(m)
    except CertificateError:
        return False
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            sub = [[m[i][j] for j in idx] for i in idx]
            if _sign(_det(sub)) < 0:
                return False
    return True


# -- exact block solutions ---------------------------------------------------

@dataclass
class ExactBlockSolution:
    """PSD-verified exact feasible point of the sum-of-squares side and the
    bound it certifies (mu = b0 + tr[A_0 X])."""

    problem: object
    xblocks: tuple
    mu: AlgebraicScalar


def exact_block_solution(problem, xblocks) -> ExactBlockSolution:
    """Validate exact X blocks against the problem: Hermitian, PSD (via
    ldl), frozen blocks zero, and every equality constraint satisfied
    exactly; computes the certified bound."""
    if not problem.exact:
        raise CertificateError(
            "problem data is not exact; constraints cannot be verified "
            "symbolically")
    if len(xblocks) != problem.nblocks:
        raise CertificateError("one X block per problem block required")
    frozen_blocks = []
    for i, x in enumerate(xblocks):
        n = problem.block_sizes[i]
        if len(x) != n or any(len(row) != n for row in x):
            raise CertificateError(f"block {i} has the wrong shape")
        if i in problem.frozen:
            if any(not v.is_zero() for row in x for v in row):
                raise CertificateError(f"frozen block {i} must be zero")
            frozen_blocks.append(freeze(matrix(x)))
            continue
        try:
            ldl(x)
        except CertificateError as e:
            raise CertificateError(f"block {i}: {e}") from None
        frozen_blocks.append(freeze(matrix(x)))
    for l in range(problem.nvars):
        s = problem.b[l]
        for i in range(problem.nblocks):
            s = s + trace(mat_mul(problem.A[l + 1][i], frozen_blocks[i]))
        if not s.is_zero():
            raise CertificateError(
                f"equality constraint {l} fails exactly; residual "
                f"tr[A X] + b = {serialize(s)}")
    mu = problem.b0
    for i in range(problem.nblocks):
        mu = mu + trace(mat_mul(problem.A[0][i], frozen_blocks[i]))
    if not (mu - mu.conj()).is_zero():
        raise CertificateError(f"certified bound {serialize(mu)} is not real")
    return ExactBlockSolution(problem, tuple(frozen_blocks), mu)


def round_to_exact(sol, tower: FieldTower, denom_bound: int = 64,
                   tol: float = 1e-6) -> ExactBlockSolution:
    """Recognize every entry of a numeric solution in the field tower and
    re-verify all constraints exactly.  Exact solutions pass through."""
    problem = sol.problem
    if sol.exact:
        return exact_block_solution(problem, sol.xblocks)
    xblocks = []
    for i in range(problem.nblocks):
        n = problem.block_sizes[i]
        if i in problem.frozen:
            xblocks.append(freeze(zeros(n, n)))
            continue
        blk = sol.xblocks[i]
        out = zeros(n, n)
        for r in range(n):
            for c in range(r, n):
                v = complex(blk[r][c] + blk[c][r].conjugate()) / 2
                if abs(v.imag) <= tol:
                    v = v.real
                try:
                    ex = recognize(v, tower, denom_bound, tol)
                except FieldError as e:
                    raise CertificateError(
                        f"block {i} entry ({r},{c}): {e}") from None
                out[r][c] = ex
                out[c][r] = ex.conj()
        xblocks.append(freeze(out))
    return exact_block_solution(problem, tuple(xblocks))


def dual_blocks(problem, ytilde) -> tuple:
    """Exact moment-side blocks Z_i = A0_i + sum_l y_l Al_i."""
    out = []
    for i in range(problem.nblocks):
        n = problem.block_sizes[i]
        z = [[problem.A[0][i][r][c] for c in range(n)] for r in range(n)]
        for l, y in enumerate(ytilde):
            if y.is_zero():
                continue
            al = problem.A[l + 1][i]
            for r in range(n):
                for c in range(n):
                    z[r][c] = z[r][c] + al[r][c] * y
        out.append(freeze(z))
    return tuple(out)


def complementary_solution(problem, zblocks) -> ExactBlockSolution:
    """Exact optimum of the sum-of-squares side pinned by complementarity.

    Given exact blocks of a conjectured optimal moment matrix (for example
    evaluated from a known realization), complementarity X Z = 0 confines
    each live X block to the kernel of its Z block; the equality
    constraints then determine the kernel coordinates as an exact linear
    system.  Only real symmetric data is supported."""
    if not problem.exact:
        raise CertificateError("problem data is not exact")
    live = problem.live_blocks

    def ensure_real(mat, what):
        for row in mat:
            for v in row:
                if not (v - v.conj()).is_zero():
                    raise CertificateError(
                        f"{what} has complex entries; complementarity "
                        "pinning supports real symmetric data only")

    for l in range(problem.nvars + 1):
        for i in live:
            ensure_real(problem.A[l][i], f"data matrix {l}")
    params = []
    kernels = {}
    for i in live:
        ensure_real(zblocks[i], f"dual block {i}")
        kern = nullspace(matrix(zblocks[i]))
        kernels[i] = kern
        n = problem.block_sizes[i]
        for a in range(len(kern)):
            for b in range(a, len(kern)):
                u, v = kern[a], kern[b]
                if a == b:
                    bmat = [[u[r] * u[c] for c in range(n)] for r in range(n)]
                else:
                    bmat = [[u[r] * v[c] + v[r] * u[c] for c in range(n)]
                            for r in range(n)]
                params.append((i, freeze(bmat)))
    if not params:
        xblocks = tuple(freeze(zeros(n, n)) for n in problem.block_sizes)
        return exact_block_solution(problem, xblocks)
    mat = [[trace(mat_mul(problem.A[l + 1][i], bmat))
            for (i, bmat) in params] for l in range(problem.nvars)]
    rhs = [[-problem.b[l]] for l in range(problem.nvars)]
    coeffs = and_solve(mat, rhs)
    if coeffs is None:
        raise CertificateError(
            "equality constraints are inconsistent with the conjectured "
            "dual optimum; the complementarity ansatz fails")
    xblocks = [zeros(n, n) for n in problem.block_sizes]
    for (i, bmat), coeff in zip(params, coeffs):
        c = coeff[0]
        if c.is_zero():
            continue
        n = problem.block_sizes[i]
        for r in range(n):
            for col in range(n):
                xblocks[i][r][col] = xblocks[i][r][col] + bmat[r][col] * c
    return exact_block_solution(problem, tuple(freeze(x) for x in xblocks))


# -- sum-of-squares extraction and verification -------------------------------

@dataclass
class SosDecomposition:
    """mu - E = sum_l terms[l][0] * (terms[l][1])* (terms[l][1]); weights are
    the unsquare-rooted D entries."""

    terms: list
    mu: AlgebraicScalar


def _combine(coeffs, polys) -> NcPolynomial:
    acc = NcPolynomial.zero()
    for c, p in zip(coeffs, polys):
        if not c.is_zero():
            acc = acc + p * c
    return acc


def extract_sos(sol: ExactBlockSolution, dec, sequence) -> SosDecomposition:
    """Sum-of-squares terms from an exact block solution.

    With a decomposition, block i contributes polynomials
    (Ltilde_i (x) M_i)^dag applied to the I^{-(i)} rows of the generating
    sequence, with weights Dtilde_s E_ت / d_i where C_i = M_i E_i M_i^dag;
    without one (dec=None), the single moment block factors directly as
    X = L D L^dag with weights D."""
    problem = sol.problem
    qpolys = list(sequence)
    terms = []
    if dec is None:
        if problem.nblocks != 1:
            raise CertificateError(
                "direct extraction expects the single-block moment problem")
        if problem.block_sizes[0] != len(qpolys):
            raise CertificateError("generating sequence length does not "
                                   "match the moment block")
        lmat, dvals = ldl(sol.xblocks[0])
        for s, w in enumerate(dvals):
            poly = _combine([lmat[i][s].conj() for i in range(len(qpolys))],
                            qpolys)
            if not poly.is_zero():
                terms.append((w, poly))
        return SosDecomposition(terms, sol.mu)

    kept = [ci for ci, comp in enumerate(dec.components) if comp.multiplicity]
    if len(kept) != problem.nblocks:
        raise CertificateError("decomposition does not match the problem "
                               "block structure")
    for j, ci in enumerate(kept):
        comp = dec.components[ci]
        mult, d = comp.multiplicity, comp.irrep.dimension
        if problem.block_sizes[j] != mult:
            raise CertificateError("decomposition does not match the "
                                   "problem block structure")
        x = sol.xblocks[j]
        if all(v.is_zero() for row in x for v in row):
            continue
        lmat, dvals = ldl(x)
        mmat, evals = ldl(matrix(comp.unitarizer))
        qrows = [_combine(comp.project[row], qpolys)
                 for row in range(mult * d)]
        for s in range(len(dvals)):
            for t in range(len(evals)):
                w = dvals[s] * evals[t] * rational(1, d)
                poly = NcPolynomial.zero()
                for jj in range(mult):
                    lc = lmat[jj][s].conj()
                    if lc.is_zero():
                        continue
                    for a in range(d):
                        mc = mmat[a][t].conj()
                        if mc.is_zero():
                            continue
                        poly = poly + qrows[jj * d + a] * (lc * mc)
                if not w.is_zero() and not poly.is_zero():
                    terms.append((w, poly))
    return SosDecomposition(terms, sol.mu)


def sos_residual(c: SosDecomposition, expression) -> NcPolynomial:
    """mu - E - sum_l weight_l poly_l^dag poly_l in the quotient ring."""
    acc = NcPolynomial.constant(c.mu) - expression.poly
    for w, p in c.terms:
        acc = acc - (p.adjoint() * p) * w
    return acc


def verify_sos(c: SosDecomposition, expression) -> bool:
    """Exact verification: all weights real nonnegative and the expansion
    matches mu - E term by term."""
    for w, _ in c.terms:
        if not (w - w.conj()).is_zero() or _sign(w) < 0:
            return False
    return sos_residual(c, expression).is_zero()


def first_mismatch(c: SosDecomposition, expression):
    """None when the identity holds; otherwise the first differing monomial
    (with its residual coefficient) in the deterministic monomial order."""
    r = sos_residual(c, expression)
    if r.is_zero():
        return None
    w = r.leading_word()
    return serialize_polynomial(NcPolynomial.monomial(w, r.coefficient(w)))


# -- certificate files ---------------------------------------------------------

@dataclass
class SosCertificate:
    """A certificate file: named expression, its scenario, the generating
    sequence it came from, and the decomposition itself."""

    name: str
    scenario: Scenario
    sequence: list
    decomposition: SosDecomposition


def write_certificate(cert: SosCertificate, path) -> None:
    s = cert.scenario
    lines = ["# sum-of-squares certificate",
             f"name {cert.name}",
             f"scenario {s.parties} {s.settings} {s.outcomes}",
             f"mu {serialize(cert.decomposition.mu)}"]
    for q in cert.sequence:
        lines.append(f"sequence {serialize_polynomial(q)}")
    for w, p in cert.decomposition.terms:
        lines.append(f"term {serialize(w)} :: {serialize_polynomial(p)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_certificate(path) -> SosCertificate:
    name = None
    scenario = None
    mu = None
    sequence = []
    terms = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(" ")
            try:
                if key == "name":
                    name = rest.strip()
                elif key == "scenario":
                    p, x, o = (int(t) for t in rest.split())
                    scenario = Scenario(p, x, o)
                elif key == "mu":
                    mu = parse_scalar(rest.strip())
                elif key == "sequence":
                    sequence.append(parse_polynomial(rest.strip()))
                elif key == "term":
                    wtext, sep, ptext = rest.partition(" :: ")
                    if not sep:
                        raise CertificateError(
                            "term line needs 'weight :: polynomial'")
                    terms.append((parse_scalar(wtext.strip()),
                                  parse_polynomial(ptext.strip())))
                else:
                    raise CertificateError(f"unknown key {key!r}")
            except (ParseError, FieldError, ValueError,
                    CertificateError) as e:
                raise CertificateError(f"{path}:{ln}: {e}") from None
    if name is None or scenario is None or mu is None:
        raise CertificateError(
            f"{path}: certificate needs name, scenario, and mu headers")
    if not terms:
        raise CertificateError(f"{path}: certificate has no terms")
    return SosCertificate(name, scenario, sequence,
                          SosDecomposition(terms, mu))
