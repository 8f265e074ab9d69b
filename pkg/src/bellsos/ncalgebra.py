"""Noncommutative polynomial algebra for Bell scenarios.

Operators are projector generators P_{a|x} per party, written in the
Collins-Gisin convention: for each measurement the last outcome's projector
is eliminated (it equals 1 minus the sum of the others).  The quotient ring
relations are

    - generators of different parties commute,
    - P_{a|x} P_{a'|x} = delta_{a,a'} P_{a|x}  (same party, same setting),

and the adjoint reverses words and conjugates coefficients.  Words are kept
in a normal form (parties sorted, same-party relations applied) that makes
the rewriting confluent: every product of generator words reduces to either
zero or a single normal word.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactfield import (
    ONE, ZERO, AlgebraicScalar, I_UNIT, ParseError, parse_scalar, serialize,
)

PARTY_LETTERS = "ABCDEFGH"

# A generator is a tuple (party, setting, outcome); a word is a tuple of
# generators and the empty word is the ring unit.
Generator = tuple
Word = tuple


@dataclass(frozen=True)
class Scenario:
    """A Bell scenario: `parties` sites, `settings` measurements per site,
    `outcomes` outcomes per measurement."""

    parties: int
    settings: int
    outcomes: int

    def __post_init__(self):
        if self.parties < 1 or self.parties > len(PARTY_LETTERS):
            raise ValueError(f"unsupported number of parties {self.parties}")
        if self.settings < 1 or self.outcomes < 2:
            raise ValueError("need at least one setting and two outcomes")

    def generators(self) -> list[Generator]:
        """All Collins-Gisin generators, party-major then setting then outcome."""
        return [(p, x, a)
                for p in range(self.parties)
                for x in range(self.settings)
                for a in range(self.outcomes - 1)]

    def generator_index(self) -> dict[Generator, int]:
        return {g: i for i, g in enumerate(self.generators())}

    def contains(self, gen: Generator) -> bool:
        p, x, a = gen
        return (0 <= p < self.parties and 0 <= x < self.settings
                and 0 <= a < self.outcomes - 1)


def generator_str(gen: Generator) -> str:
    p, x, a = gen
    return f"{PARTY_LETTERS[p]}{a}|{x}"


def word_str(word: Word) -> str:
    return " ".join(generator_str(g) for g in word) if word else "1"


def normal_form(word) -> Word | None:
    """Normal form of a product of generators; None encodes zero."""
    letters = sorted(word, key=lambda g: g[0])
    stack: list[Generator] = []
    for g in letters:
        if stack:
            top = stack[-1]
            if top[0] == g[0] and top[1] == g[1]:
                if top[2] == g[2]:
                    continue  # idempotent
                return None  # orthogonal outcomes annihilate
        stack.append(g)
    return tuple(stack)


def word_adjoint(word: Word) -> Word:
    return tuple(reversed(word))


def monomial_key(word: Word):
    """Graded lexicographic order used everywhere a deterministic monomial
    order is needed."""
    return (len(word), word)


class NcPolynomial:
    """Element of the quotient ring: dict from normal words to exact scalars."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        t: dict = {}
        if terms:
            for word, coeff in terms.items():
                c = AlgebraicScalar.of(coeff) if not isinstance(coeff, AlgebraicScalar) else coeff
                if c.is_zero():
                    continue
                nf = normal_form(word)
                if nf is None:
                    continue
                prev = t.get(nf)
                s = c if prev is None else prev + c
                if s.is_zero():
                    t.pop(nf, None)
                else:
                    t[nf] = s
        self._terms = t

    @staticmethod
    def _raw(terms: dict) -> "NcPolynomial":
        out = NcPolynomial.__new__(NcPolynomial)
        out._terms = terms
        return out

    @staticmethod
    def zero() -> "NcPolynomial":
        return NcPolynomial._raw({})

    @staticmethod
    def one() -> "NcPolynomial":
        return NcPolynomial._raw({(): ONE})

    @staticmethod
    def constant(c) -> "NcPolynomial":
        c = AlgebraicScalar.of(c)
        return NcPolynomial._raw({(): c} if not c.is_zero() else {})

    @staticmethod
    def generator(gen: Generator) -> "NcPolynomial":
        return NcPolynomial._raw({(gen,): ONE})

    @staticmethod
    def monomial(word, coeff=1) -> "NcPolynomial":
        return NcPolynomial({tuple(word): coeff})

    # -- inspection ---------------------------------------------------

    def terms(self) -> dict:
        return dict(self._terms)

    def words(self):
        return self._terms.keys()

    def coefficient(self, word) -> AlgebraicScalar:
        return self._terms.get(tuple(word), ZERO)

    def constant_term(self) -> AlgebraicScalar:
        return self._terms.get((), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def leading_word(self) -> Word:
        return min(self._terms, key=monomial_key)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        t = dict(self._terms)
        for w, c in other._terms.items():
            prev = t.get(w)
            s = c if prev is None else prev + c
            if s.is_zero():
                t.pop(w, None)
            else:
                t[w] = s
        return NcPolynomial._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return NcPolynomial._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicScalar)):
            c = AlgebraicScalar.of(other)
            if c.is_zero():
                return NcPolynomial.zero()
            return NcPolynomial._raw({w: k * c for w, k in self._terms.items()})
        other = _coerce(other)
        t: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                nf = normal_form(w1 + w2)
                if nf is None:
                    continue
                c = c1 * c2
                prev = t.get(nf)
                s = c if prev is None else prev + c
                if s.is_zero():
                    t.pop(nf, None)
                else:
                    t[nf] = s
        return NcPolynomial._raw(t)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicScalar)):
            return self * other
        return _coerce(other) * self

    def conj(self) -> "NcPolynomial":
        """Coefficient-wise complex conjugation (words untouched)."""
        return NcPolynomial._raw({w: c.conj() for w, c in self._terms.items()})

    def adjoint(self) -> "NcPolynomial":
        t: dict = {}
        for w, c in self._terms.items():
            nf = normal_form(word_adjoint(w))
            if nf is None:
                continue
            cc = c.conj()
            prev = t.get(nf)
            s = cc if prev is None else prev + cc
            if s.is_zero():
                t.pop(nf, None)
            else:
                t[nf] = s
        return NcPolynomial._raw(t)

    def is_self_adjoint(self) -> bool:
        return self == self.adjoint()

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"NcPolynomial({serialize_polynomial(self)!r})"

    def __str__(self):
        return serialize_polynomial(self)


def _coerce(value) -> NcPolynomial:
    if isinstance(value, NcPolynomial):
        return value
    if isinstance(value, (int, Fraction, AlgebraicScalar)):
        return NcPolynomial.constant(value)
    raise ValueError(f"cannot coerce {value!r} to NcPolynomial")


def hermitian_split(p: NcPolynomial) -> tuple[NcPolynomial, NcPolynomial]:
    """(p + p*, i(p - p*)): two self-adjoint combinations spanning p, p*."""
    adj = p.adjoint()
    return p + adj, (p - adj) * I_UNIT


# -- text form ----------------------------------------------------------

def serialize_polynomial(p: NcPolynomial) -> str:
    """Deterministic text form: terms in monomial order joined by ' + ', each
    term a space-free scalar (omitted when 1) followed by generator tokens.
    Scalars contain no spaces, so the ' + ' joiner is unambiguous."""
    if p.is_zero():
        return "(0/1)"
    parts = []
    for w in sorted(p._terms, key=monomial_key):
        c = p._terms[w]
        mono = " ".join(generator_str(g) for g in w)
        if not w:
            parts.append(serialize(c))
        elif c == ONE:
            parts.append(mono)
        else:
            parts.append(f"{serialize(c)} {mono}")
    return " + ".join(parts)


_GEN_RE = None


def _gen_pattern():
    global _GEN_RE
    if _GEN_RE is None:
        import re
        _GEN_RE = re.compile(r"^([A-H])(\d+)\|(\d+)$")
    return _GEN_RE


def parse_generator(token: str) -> Generator:
    m = _gen_pattern().match(token.strip())
    if not m:
        raise ParseError(f"bad generator token {token!r}")
    letter, a, x = m.groups()
    return (PARTY_LETTERS.index(letter), int(x), int(a))


def parse_polynomial(text: str) -> NcPolynomial:
    src = text.strip()
    if not src:
        raise ParseError("empty polynomial")
    total = NcPolynomial.zero()
    for chunk in src.split(" + "):
        tokens = chunk.split()
        if not tokens:
            raise ParseError(f"empty term in {text!r}")
        coeff = ONE
        if not _gen_pattern().match(tokens[0]):
            coeff = parse_scalar(tokens[0])
            tokens = tokens[1:]
        word = tuple(parse_generator(tok) for tok in tokens)
        total = total + NcPolynomial({word: coeff})
    return total
