"""Exact arithmetic in multi-quadratic number fields Q(i, sqrt(d1), ..., sqrt(dk)).

Scalars are stored as rational coordinates over the canonical basis of such a
field: products of square roots of distinct square-free integers, optionally
multiplied by the imaginary unit.  All arithmetic (including division and
complex conjugation) is exact.  Numeric embeddings go through mpmath so the
precision is controllable, and `recognize` maps floating-point values back to
exact scalars with bounded denominators.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import mpmath


class FieldError(ValueError):
    pass


class ParseError(FieldError):
    pass


class AmbiguityError(FieldError):
    """Two distinct bounded-denominator scalars fit the same float."""


def _square_free_decompose(n: int) -> tuple[int, int]:
    """n = s*s*m with m square-free; returns (s, m). n must be positive."""
    if n <= 0:
        raise FieldError(f"expected a positive integer, got {n}")
    s, m = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                m *= p
        p += 1 if p == 2 else 2
    return s, m * n


def _prime_factors(m: int) -> tuple[int, ...]:
    fs = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            fs.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        fs.append(m)
    return tuple(fs)


def _radicand_product(m1: int, m2: int) -> tuple[int, int]:
    """sqrt(m1)*sqrt(m2) = g*sqrt(m) for square-free m1, m2; returns (g, m)."""
    g = math.gcd(m1, m2)
    return g, (m1 // g) * (m2 // g)


class FieldTower:
    """A declaration of the ambient field: square-free radicands plus i."""

    __slots__ = ("radicands", "imaginary")

    def __init__(self, radicands=(), imaginary: bool = False):
        closed: set[int] = {1}
        pending = []
        for r in radicands:
            r = int(r)
            if r < 2:
                raise FieldError(f"radicands must be >= 2, got {r}")
            s, m = _square_free_decompose(r)
            if m == 1:
                raise FieldError(f"radicand {r} is a perfect square")
            pending.append(m)
        for m in pending:
            for c in list(closed):
                _, prod = _radicand_product(c, m)
                closed.add(prod)
        self.radicands = frozenset(m for m in closed if m != 1)
        self.imaginary = bool(imaginary)

    def basis_radicands(self) -> list[int]:
        return [1] + sorted(self.radicands)

    def degree(self) -> int:
        return len(self.radicands) + 1 if not self.imaginary else 2 * (len(self.radicands) + 1)

    def join(self, other: "FieldTower") -> "FieldTower":
        return FieldTower(self.radicands | other.radicands,
                          self.imaginary or other.imaginary)

    def contains(self, a: "AlgebraicScalar") -> bool:
        t = a.tower()
        return t.radicands <= self.radicands and (self.imaginary or not t.imaginary)

    def __eq__(self, other):
        return (isinstance(other, FieldTower)
                and self.radicands == other.radicands
                and self.imaginary == other.imaginary)

    def __hash__(self):
        return hash((self.radicands, self.imaginary))

    def __repr__(self):
        rads = ",".join(str(r) for r in sorted(self.radicands))
        return f"FieldTower([{rads}]{', i' if self.imaginary else ''})"


class AlgebraicScalar:
    """Element of a multi-quadratic field, exact.

    Internal representation: dict mapping (m, im) -> Fraction where m is a
    square-free positive integer (1 for the rational part) and im is 0 or 1
    for a factor of the imaginary unit.  Zero coordinates are never stored.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coords=None):
        c = {}
        if coords:
            for (m, im), f in coords.items():
                if f:
                    c[(int(m), int(im))] = Fraction(f)
        self._c = c
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_fraction(f) -> "AlgebraicScalar":
        f = Fraction(f)
        return AlgebraicScalar({(1, 0): f}) if f else ZERO

    @staticmethod
    def of(value) -> "AlgebraicScalar":
        if isinstance(value, AlgebraicScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return AlgebraicScalar.from_fraction(value)
        raise FieldError(f"cannot coerce {value!r} to AlgebraicScalar")

    # -- inspection ---------------------------------------------------

    def coords(self) -> dict:
        return dict(self._c)

    def tower(self) -> FieldTower:
        rads = {m for (m, _) in self._c if m != 1}
        return FieldTower(rads, any(im for (_, im) in self._c))

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return all(k == (1, 0) for k in self._c)

    def is_real(self) -> bool:
        return all(im == 0 for (_, im) in self._c)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self} is not rational")
        return self._c.get((1, 0), Fraction(0))

    def real(self) -> "AlgebraicScalar":
        return AlgebraicScalar({k: f for k, f in self._c.items() if k[1] == 0})

    def imag(self) -> "AlgebraicScalar":
        return AlgebraicScalar({(m, 0): f for (m, im), f in self._c.items() if im == 1})

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, (AlgebraicScalar, int, Fraction)):
            return NotImplemented
        other = AlgebraicScalar.of(other)
        c = dict(self._c)
        for k, f in other._c.items():
            s = c.get(k, 0) + f
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return AlgebraicScalar._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicScalar._raw({k: -f for k, f in self._c.items()})

    def __sub__(self, other):
        if not isinstance(other, (AlgebraicScalar, int, Fraction)):
            return NotImplemented
        return self + (-AlgebraicScalar.of(other))

    def __rsub__(self, other):
        return AlgebraicScalar.of(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, (AlgebraicScalar, int, Fraction)):
            return NotImplemented
        other = AlgebraicScalar.of(other)
        a, b = self._c, other._c
        if not a or not b:
            return ZERO
        c: dict = {}
        for (m1, i1), f1 in a.items():
            for (m2, i2), f2 in b.items():
                g, m = _radicand_product(m1, m2)
                f = f1 * f2 * g
                if i1 and i2:
                    f = -f
                k = (m, i1 ^ i2)
                s = c.get(k, 0) + f
                if s:
                    c[k] = s
                else:
                    c.pop(k, None)
        return AlgebraicScalar._raw(c)

    __rmul__ = __mul__

    def conj(self) -> "AlgebraicScalar":
        """Complex conjugation: i -> -i, real radicals untouched."""
        return AlgebraicScalar._raw(
            {k: (-f if k[1] else f) for k, f in self._c.items()})

    def _galois_flip(self, p: int) -> "AlgebraicScalar":
        """Field automorphism negating every basis radical divisible by p."""
        return AlgebraicScalar._raw(
            {k: (-f if k[0] % p == 0 else f) for k, f in self._c.items()})

    def inverse(self) -> "AlgebraicScalar":
        if not self._c:
            raise ZeroDivisionError("division by zero AlgebraicScalar")
        if self.is_rational():
            return AlgebraicScalar.from_fraction(1 / self._c[(1, 0)])
        if not self.is_real():
            cb = self.conj()
            return cb * (self * cb).inverse()
        p = min(_prime_factors(m)[0] for (m, _) in self._c if m != 1)
        flip = self._galois_flip(p)
        return flip * (self * flip).inverse()

    def __truediv__(self, other):
        return self * AlgebraicScalar.of(other).inverse()

    def __rtruediv__(self, other):
        return AlgebraicScalar.of(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other):
        try:
            other = AlgebraicScalar.of(other)
        except FieldError:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def sign(self) -> int:
        """Exact sign of a real scalar: -1, 0, or +1."""
        if not self._c:
            return 0
        if not self.is_real():
            raise FieldError(f"sign of non-real scalar {self}")
        if self.is_rational():
            f = self._c[(1, 0)]
            return (f > 0) - (f < 0)
        prec = 64
        while prec <= 1 << 14:
            lo, hi = self._interval(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise FieldError(f"could not resolve the sign of {self}")

    def _interval(self, prec: int):
        iv = mpmath.iv
        old = iv.prec
        try:
            iv.prec = prec
            total = iv.mpf(0)
            for (m, im), f in self._c.items():
                if im:
                    raise FieldError("interval of non-real scalar")
                t = iv.mpf(f.numerator) / iv.mpf(f.denominator)
                if m != 1:
                    t *= iv.sqrt(m)
                total += t
            return total.a, total.b
        finally:
            iv.prec = old

    def __lt__(self, other):
        return (self - AlgebraicScalar.of(other)).sign() < 0

    def __le__(self, other):
        return (self - AlgebraicScalar.of(other)).sign() <= 0

    def __gt__(self, other):
        return (self - AlgebraicScalar.of(other)).sign() > 0

    def __ge__(self, other):
        return (self - AlgebraicScalar.of(other)).sign() >= 0

    def __bool__(self):
        return bool(self._c)

    # -- output ---------------------------------------------------------

    def __repr__(self):
        return f"AlgebraicScalar({serialize(self)!r})"

    def __str__(self):
        return serialize(self)

    @staticmethod
    def _raw(c: dict) -> "AlgebraicScalar":
        out = AlgebraicScalar.__new__(AlgebraicScalar)
        out._c = c
        out._hash = None
        return out


ZERO = AlgebraicScalar()
ONE = AlgebraicScalar({(1, 0): Fraction(1)})
I_UNIT = AlgebraicScalar({(1, 1): Fraction(1)})


def rational(p, q=1) -> AlgebraicScalar:
    return AlgebraicScalar.from_fraction(Fraction(p, q))


def sqrt_rational(value) -> AlgebraicScalar:
    """Exact square root of a rational; adjoins a radical when needed."""
    if isinstance(value, AlgebraicScalar):
        value = value.to_fraction()
    f = Fraction(value)
    if f == 0:
        return ZERO
    unit = ONE
    if f < 0:
        unit = I_UNIT
        f = -f
    s, m = _square_free_decompose(f.numerator * f.denominator)
    coeff = Fraction(s, f.denominator)
    if m == 1:
        return unit * AlgebraicScalar.from_fraction(coeff)
    return unit * AlgebraicScalar({(m, 0): coeff})


SQRT2 = sqrt_rational(2)


# -- numeric embedding --------------------------------------------------

_COS_15 = {}  # filled lazily: cos of u*15 degrees as AlgebraicScalar


def _cos_table():
    if not _COS_15:
        half = rational(1, 2)
        s2, s3, s6 = sqrt_rational(2), sqrt_rational(3), sqrt_rational(6)
        quarter = rational(1, 4)
        base = [ONE, (s6 + s2) * quarter, s3 * half, s2 * half, half,
                (s6 - s2) * quarter, ZERO]
        for u in range(24):
            v = u if u <= 12 else 24 - u
            _COS_15[u] = base[v] if v <= 6 else -base[12 - v]
    return _COS_15


def exact_root_of_unity(p: int, q: int) -> AlgebraicScalar:
    """exp(2 pi i p / q) for q dividing 24, in the tower Q(i, sqrt2, sqrt3)."""
    if q <= 0 or 24 % q != 0:
        raise FieldError(f"exp(2 pi i / {q}) is outside the supported towers")
    table = _cos_table()
    u = (24 // q * p) % 24
    return table[u] + I_UNIT * table[(u - 6) % 24]


def _embed_mp(a: AlgebraicScalar):
    """mpmath complex value of `a` at the current working precision."""
    re_part = mpmath.mpf(0)
    im_part = mpmath.mpf(0)
    for (m, im), f in a._c.items():
        t = mpmath.mpf(f.numerator) / f.denominator
        if m != 1:
            t *= mpmath.sqrt(m)
        if im:
            im_part += t
        else:
            re_part += t
    return mpmath.mpc(re_part, im_part)


def to_float(a: AlgebraicScalar, precision_bits: int = 53):
    """Embed into C. Returns a Python complex for the default precision,
    an mpmath mpc above it."""
    with mpmath.workprec(precision_bits + 16):
        v = _embed_mp(a)
    if precision_bits <= 53:
        return complex(v)
    with mpmath.workprec(precision_bits):
        return _embed_mp(a)


def to_real_float(a: AlgebraicScalar) -> float:
    v = to_float(a)
    if v.imag:
        raise FieldError(f"{a} is not real")
    return v.real


# -- serialization ------------------------------------------------------

_TERM_RE = re.compile(
    r"^\(\s*(-?\d+)\s*/\s*(\d+)\s*\)(?:\s*\*\s*sqrt\(\s*(\d+)\s*\))?(?:\s*\*\s*(i))?$")


def serialize(a: AlgebraicScalar) -> str:
    if not a._c:
        return "(0/1)"
    parts = []
    for (m, im) in sorted(a._c, key=lambda k: (k[1], k[0])):
        f = a._c[(m, im)]
        t = f"({f.numerator}/{f.denominator})"
        if m != 1:
            t += f"*sqrt({m})"
        if im:
            t += "*i"
        parts.append(t)
    return "+".join(parts)


def parse_scalar(text: str) -> AlgebraicScalar:
    src = text.strip()
    if not src:
        raise ParseError("empty scalar")
    # split on '+' at depth zero
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(src):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0:
            terms.append(src[start:i])
            start = i + 1
    terms.append(src[start:])
    coords: dict = {}
    for term in terms:
        mobj = _TERM_RE.match(term.strip())
        if not mobj:
            raise ParseError(f"bad scalar term {term!r} in {text!r}")
        p, q, m, imag = mobj.groups()
        if int(q) == 0:
            raise ParseError(f"zero denominator in {term!r}")
        f = Fraction(int(p), int(q))
        mval = int(m) if m else 1
        if m:
            s, mval = _square_free_decompose(mval)
            f *= s
        key = (mval, 1 if imag else 0)
        coords[key] = coords.get(key, Fraction(0)) + f
    return AlgebraicScalar(coords)


# -- recognition --------------------------------------------------------

def _farey_neighbors(f: Fraction, denom_bound: int):
    """Nearest rationals with denominator <= denom_bound on each side of f."""
    p, q = f.numerator, f.denominator
    out = []
    for sign in (1, -1):
        # solve a*q - b*p = sign with 1 <= b <= denom_bound maximal
        b0 = (sign * -pow(p, -1, q)) % q if q > 1 else 0
        if b0 == 0:
            b0 = q
        if b0 > denom_bound:
            continue
        b = b0 + q * ((denom_bound - b0) // q)
        a = (sign + b * p) // q
        out.append(Fraction(a, b))
    return out


def _rational_candidates(x: float, denom_bound: int, tol: float):
    """All rationals with denominator <= denom_bound within tol of x."""
    best = Fraction(x).limit_denominator(denom_bound)
    if abs(float(best) - x) > tol:
        return []
    out = [best]
    for nb in _farey_neighbors(best, denom_bound):
        if abs(float(nb) - x) <= tol:
            out.append(nb)
    return out


def _recognize_real(x: float, tower: FieldTower, denom_bound: int, tol: float):
    basis = tower.basis_radicands()
    if len(basis) == 1:
        cands = _rational_candidates(x, denom_bound, tol)
        if not cands:
            return None
        if len(cands) > 1:
            raise AmbiguityError(
                f"{x} fits {cands[0]} and {cands[1]} within {tol}")
        return {(1, 0): cands[0]}

    def attempt(val):
        with mpmath.workprec(200):
            vec = [mpmath.mpf(val)] + [mpmath.sqrt(m) for m in basis]
            rel = mpmath.pslq(vec, tol=mpmath.mpf(tol) / 4,
                              maxcoeff=10 ** 9, maxsteps=10 ** 5)
        if rel is None or rel[0] == 0:
            return None
        coords = {}
        for m, n in zip(basis, rel[1:]):
            f = Fraction(-n, rel[0])
            if f:
                if f.denominator > denom_bound:
                    return None
                coords[(m, 0)] = f
        cand = AlgebraicScalar(coords)
        err = abs(to_float(cand, 80).real - mpmath.mpf(val))
        return (coords, cand) if err <= tol else None

    found = attempt(x)
    if found is None:
        return None
    coords, cand = found
    # ambiguity probe: nudging x by the tolerance must not reveal a second
    # bounded-denominator candidate that also fits the original value.
    for probe in (x - 1.5 * tol, x + 1.5 * tol):
        other = attempt(probe)
        if other is not None and other[1] != cand:
            if abs(to_float(other[1], 80).real - mpmath.mpf(x)) <= tol:
                raise AmbiguityError(
                    f"{x} fits both {cand} and {other[1]} within {tol}")
    return coords


def recognize(x, tower: FieldTower, denom_bound: int = 64,
              tol: float = 1e-6) -> AlgebraicScalar:
    """Map a floating-point (possibly complex) value to the unique scalar of
    the tower whose coordinate denominators are <= denom_bound and whose
    embedding lies within tol of x.  Raises FieldError if none fits and
    AmbiguityError if more than one does."""
    xc = complex(x)
    if xc.imag and not tower.imaginary:
        raise FieldError(f"{x} has an imaginary part but the tower is real")
    coords = _recognize_real(xc.real, tower, denom_bound, tol)
    if coords is None:
        raise FieldError(
            f"no scalar over {tower} with denominators <= {denom_bound} "
            f"within {tol} of {x}")
    if xc.imag:
        im_coords = _recognize_real(xc.imag, tower, denom_bound, tol)
        if im_coords is None:
            raise FieldError(
                f"no scalar over {tower} with denominators <= {denom_bound} "
                f"within {tol} of {x}")
        for (m, _), f in im_coords.items():
            coords[(m, 1)] = f
    result = AlgebraicScalar(coords)
    err = abs(complex(to_float(result, 80)) - xc)
    if err > tol:
        raise FieldError(f"recognized {result} misses {x} by {err}")
    return result
