"""Exact dense linear algebra over AlgebraicScalar entries.

Small matrices only (the reduced problems here stay well under 200x200);
everything is Gaussian elimination with exact zero tests.
"""

from __future__ import annotations

from .exactfield import ONE, ZERO, AlgebraicScalar


def scalar(value) -> AlgebraicScalar:
    return value if isinstance(value, AlgebraicScalar) else AlgebraicScalar.of(value)


def matrix(rows) -> list[list[AlgebraicScalar]]:
    return [[scalar(v) for v in row] for row in rows]


def identity(n: int) -> list[list[AlgebraicScalar]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> list[list[AlgebraicScalar]]:
    return [[ZERO] * m for _ in range(n)]


def mat_mul(a, b) -> list[list[AlgebraicScalar]]:
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        for l in range(k):
            f = ai[l]
            if f.is_zero():
                continue
            bl = b[l]
            row = out[i]
            for j in range(m):
                if not bl[j].is_zero():
                    row[j] = row[j] + f * bl[j]
    return out

def mat_vec(a, v) -> list[AlgebraicScalar]:
    return [sum((f * x for f, x in zip(row, v) if not f.is_zero()), ZERO)
            for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, f):
    f = scalar(f)
    return [[x * f for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_conj(a):
    return [[x.conj() for x in row] for row in a]


def adjoint(a):
    return [[a[j][i].conj() for j in range(len(a))] for i in range(len(a[0]))]


def mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero_matrix(a) -> bool:
    return all(x.is_zero() for row in a for x in row)


def freeze(a) -> tuple:
    return tuple(tuple(row) for row in a)


def kron(a, b):
    na, ma, nb, mb = len(a), len(a[0]), len(b), len(b[0])
    out = zeros(na * nb, ma * mb)
    for i in range(na):
        for j in range(ma):
            f = a[i][j]
            if f.is_zero():
                continue
            for k in range(nb):
                for l in range(mb):
                    out[i * nb + k][j * mb + l] = f * b[k][l]
    return out


def trace(a) -> AlgebraicScalar:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def rref(a) -> tuple[list[list[AlgebraicScalar]], list[int]]:
    """Reduced row echelon form; returns (R, pivot column indices)."""
    r = [list(row) for row in a]
    if not r:
        return r, []
    rows, cols = len(r), len(r[0])
    pivots = []
    lead = 0
    for col in range(cols):
        if lead >= rows:
            break
        piv = next((i for i in range(lead, rows) if not r[i][col].is_zero()), None)
        if piv is None:
            continue
        r[lead], r[piv] = r[piv], r[lead]
        inv = r[lead][col].inverse()
        r[lead] = [x * inv for x in r[lead]]
        for i in range(rows):
            if i != lead and not r[i][col].is_zero():
                f = r[i][col]
                r[i] = [x - f * y for x, y in zip(r[i], r[lead])]
        pivots.append(col)
        lead += 1
    return r, pivots


def rank(a) -> int:
    return len(rref(a)[1])


def nullspace(a) -> list[list[AlgebraicScalar]]:
    """Basis vectors of the right kernel of a (each a list of length ncols)."""
    if not a:
        return []
    r, pivots = rref(a)
    cols = len(a[0])
    basis = []
    for j in range(cols):
        if j in pivots:
            continue
        v = [ZERO] * cols
        v[j] = ONE
        for row, p in zip(r, pivots):
            v[p] = -row[j]
        basis.append(v)
    return basis


def mat_inverse(a) -> list[list[AlgebraicScalar]]:
    n = len(a)
    aug = [list(row) + ident_row for row, ident_row in zip(matrix(a), identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def solve(a, b) -> list[list[AlgebraicScalar]] | None:
    """Solve a @ x = b exactly (b is a matrix); None if inconsistent.
    Free variables are set to zero."""
    n, m = len(a), len(a[0])
    k = len(b[0])
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    r, pivots = rref(aug)
    if any(p >= m for p in pivots):
        return None
    x = zeros(m, k)
    for row, p in zip(r, pivots):
        x[p] = list(row[m:])
    return x


def express_rows(span_rows, targets):
    """Coefficients C with C @ span_rows = targets, or None if some target
    lies outside the row span."""
    c = solve(transpose(matrix(span_rows)), transpose(matrix(targets)))
    if c is None:
        return None
    return transpose(c)
