"""Moment-matrix relaxations of Bell polynomial optimization problems.

For a generating sequence Q the symbolic moment matrix is Xi = Q Q^dagger.
Its distinct entries (identified with their adjoints) yield a self-adjoint
moment basis M_0 = 1, M_1, ..., M_m together with exact Hermitian coefficient
matrices A_k such that Xi = sum_k A_k M_k, and the objective decomposes as
E = b_0 + sum_k b_k M_k.  Averaging over a finite symmetry group replaces the
M_k by the smaller set of independent averaged moments M~_l via
(M_1^bar ... M_m^bar)^T = w + W (M~_1 ... M~_mt)^T and produces invariant
coefficient matrices A'_l = sum_k W_{kl} A_k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .exactfield import I_UNIT, ONE, ZERO, AlgebraicScalar, rational, serialize
from .linalg import express_rows
from .ncalgebra import (
    NcPolynomial, Scenario, monomial_key, normal_form, parse_polynomial,
    serialize_polynomial, word_adjoint, word_str,
)
from .symmetry import representation_on


class RelaxationError(Exception):
    pass


_HALF = AlgebraicScalar.of(Fraction(1, 2))
_MINUS_I_HALF = I_UNIT * AlgebraicScalar.of(Fraction(-1, 2))


@dataclass
class GeneratingSequence:
    """Ordered, linearly independent ring elements; first entry is 1."""

    scenario: Scenario
    entries: list
    tag: str

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def generating_sequence(scenario: Scenario, level) -> GeneratingSequence:
    """Standard sequences by level, or a validated custom list.

    Levels: 1 (the identity and all generators), "1+AB" (two parties only:
    1, both parties' generators, and all A*B products), and "local:k"
    (products of at most one generator per party over at most k parties;
    level 1 is local:1 and "1+AB" is local:2 for two parties).
    """
    if isinstance(level, (list, tuple)):
        return _custom_sequence(scenario, level)
    if level == 1 or level == "1":
        width, tag = 1, "level-1"
    elif level == "1+AB":
        if scenario.parties != 2:
            raise RelaxationError(
                "level '1+AB' needs exactly two parties; use 'local:k' "
                "for other party counts")
        width, tag = 2, "1+AB"
    elif isinstance(level, str) and level.startswith("local:"):
        try:
            width = int(level.split(":", 1)[1])
        except ValueError:
            raise RelaxationError(f"bad level {level!r}") from None
        if not 1 <= width <= scenario.parties:
            raise RelaxationError(
                f"level {level!r} out of range for {scenario.parties} parties")
        tag = level
    else:
        raise RelaxationError(f"unsupported level {level!r}")
    per_party = [[NcPolynomial.generator(g) for g in scenario.generators()
                  if g[0] == p] for p in range(scenario.parties)]
    entries = [NcPolynomial.one()]
    for r in range(1, width + 1):
        for subset in combinations(range(scenario.parties), r):
            for combo in product(*[per_party[p] for p in subset]):
                e = combo[0]
                for f in combo[1:]:
                    e = e * f
                entries.append(e)
    return GeneratingSequence(scenario, entries, tag)


def _custom_sequence(scenario: Scenario, items) -> GeneratingSequence:
    entries = []
    for item in items:
        p = parse_polynomial(item) if isinstance(item, str) else item
        if not isinstance(p, NcPolynomial):
            p = NcPolynomial.constant(p)
        for w in p.words():
            for g in w:
                if not scenario.contains(g):
                    raise RelaxationError(
                        f"entry {serialize_polynomial(p)} uses a generator "
                        f"outside the scenario")
        if p.is_zero():
            raise RelaxationError("zero entry in custom sequence")
        entries.append(p)
    if not entries or entries[0] != NcPolynomial.one():
        raise RelaxationError("first entry of a generating sequence must be 1")
    words = sorted({w for p in entries for w in p.words()}, key=monomial_key)
    index = {w: i for i, w in enumerate(words)}
    rows = []
    for i, p in enumerate(entries):
        row = [ZERO] * len(words)
        for w, c in p.terms().items():
            row[index[w]] = c
        if rows:
            sol = express_rows(rows, [row])
            if sol is not None:
                combo = " + ".join(
                    f"({serialize(c)}) * entry {j}"
                    for j, c in enumerate(sol[0]) if not c.is_zero())
                raise RelaxationError(
                    f"dependent custom sequence: entry {i} "
                    f"({serialize_polynomial(p)}) = {combo}")
        rows.append(row)
    return GeneratingSequence(scenario, entries, "custom")


@dataclass
class MomentStructure:
    """Symbolic moment matrix with its self-adjoint basis and coefficients.

    `A[k]` is a sparse Hermitian matrix {(i, j): scalar} aligned with
    `basis[k]`; `b` is aligned with `basis[1:]`.
    """

    scenario: Scenario
    sequence: GeneratingSequence
    xi: list
    basis: list
    A: list
    b0: AlgebraicScalar
    b: list
    conjugation_reduced: bool = False

    @property
    def size(self) -> int:
        return len(self.xi)


@dataclass
class SymmetrizedMoments:
    """Group-averaged moment structure.

    `basis` is [1, M~_1, ...]; `A` is [A'_0, A'_1, ...] (sparse Hermitian);
    `w` and `W` express the averaged original moments over the reduced ones;
    `xi` is the averaged moment matrix.
    """

    scenario: Scenario
    sequence: GeneratingSequence
    group: object
    rho: object
    xi: list
    basis: list
    A: list
    b0: AlgebraicScalar
    b: list
    w: list
    W: list
    conjugation_reduced: bool = False

    @property
    def size(self) -> int:
        return len(self.xi)

    @property
    def tilde_basis(self) -> list:
        return self.basis

    @property
    def Aprime(self) -> list:
        return self.A

    @property
    def tilde_b0(self) -> AlgebraicScalar:
        return self.b0

    @property
    def tilde_b(self) -> list:
        return self.b


def dense_matrix(entries: dict, n: int) -> list:
    out = [[ZERO] * n for _ in range(n)]
    for (i, j), c in entries.items():
        out[i][j] = c
    return out


def reconstructed_xi(ms) -> list:
    """Sum_k A_k M_k as a symbolic matrix (for checking against xi)."""
    n = ms.size
    acc = [[NcPolynomial.zero() for _ in range(n)] for _ in range(n)]
    for mk, ak in zip(ms.basis, ms.A):
        for (i, j), c in ak.items():
            acc[i][j] = acc[i][j] + mk * c
    return acc


def _distinct_parties(word) -> int:
    return len({g[0] for g in word})


class _EntryClasses:
    """Distinct Xi entries up to adjoints, in first-seen scan order."""

    def __init__(self):
        self.reps = []          # (word, adjoint word, self-adjoint flag)
        self.of_word = {}

    def visit(self, w):
        cid = self.of_word.get(w)
        if cid is not None:
            return cid
        wr = normal_form(word_adjoint(w))
        cid = len(self.reps)
        self.reps.append((w, wr, wr == w))
        self.of_word[w] = cid
        if wr != w:
            self.of_word[wr] = cid
        return cid


def build_moment_structure(expression, sequence: GeneratingSequence) -> MomentStructure:
    """Extract the moment basis, coefficient matrices, and objective vector."""
    E = expression.polynomial() if hasattr(expression, "polynomial") else expression
    scenario = sequence.scenario
    if hasattr(expression, "scenario") and expression.scenario != scenario:
        raise RelaxationError("expression and sequence use different scenarios")
    Q = list(sequence.entries)
    n = len(Q)
    adj = [q.adjoint() for q in Q]
    xi = [[Q[i] * adj[j] for j in range(n)] for i in range(n)]
    if not all(len(cell.terms()) <= 1 for row in xi for cell in row):
        raise RelaxationError(
            "moment extraction needs monomial sequence entries; products of "
            "general polynomials are not reduced to a common basis")

    classes = _EntryClasses()
    for i in range(n):
        for j in range(i, n):
            cell = xi[i][j]
            if cell.is_zero():
                continue
            ((w, _),) = cell.terms().items()
            classes.visit(w)
    if not classes.reps or classes.reps[0][0] != ():
        raise RelaxationError("sequence does not generate the unit moment")

    order = sorted(range(len(classes.reps)),
                   key=lambda c: (len(classes.reps[c][0]),
                                  _distinct_parties(classes.reps[c][0]), c))
    basis, slots = [], [None] * len(classes.reps)
    for cid in order:
        w, wr, sa = classes.reps[cid]
        if sa:
            slots[cid] = (len(basis), None)
            basis.append(NcPolynomial._raw({w: ONE}))
        else:
            slots[cid] = (len(basis), len(basis) + 1)
            basis.append(NcPolynomial._raw({w: ONE, wr: ONE}))
            basis.append(NcPolynomial._raw({w: I_UNIT, wr: -I_UNIT}))

    def contributions(w, c):
        cid = classes.of_word[w]
        rep_w, _, sa = classes.reps[cid]
        k1, k2 = slots[cid]
        if sa:
            return [(k1, c)]
        # entry = c*w with w the representative (M' - i M'')/2 or its
        # adjoint (M' + i M'')/2
        sign = -ONE if w == rep_w else ONE
        return [(k1, c * _HALF), (k2, c * _HALF * I_UNIT * sign)]

    A = [dict() for _ in basis]
    for i in range(n):
        for j in range(i, n):
            cell = xi[i][j]
            if cell.is_zero():
                continue
            ((w, c),) = cell.terms().items()
            for k, v in contributions(w, c):
                A[k][(i, j)] = A[k].get((i, j), ZERO) + v
                if i != j:
                    A[k][(j, i)] = A[k].get((j, i), ZERO) + v.conj()
    A = [{pos: v for pos, v in ak.items() if not v.is_zero()} for ak in A]

    coeffs = [ZERO] * len(basis)
    missing = []
    for w, c in E.terms().items():
        if w not in classes.of_word:
            missing.append(word_str(w))
            continue
        for k, v in contributions(w, c):
            coeffs[k] = coeffs[k] + v
    if missing:
        raise RelaxationError(
            "objective not expressible over the moment matrix; missing "
            "monomials: " + ", ".join(sorted(missing)))
    if any(c.conj() != c for c in coeffs):
        raise RelaxationError("objective has non-real moment coefficients")
    return MomentStructure(scenario=scenario, sequence=sequence, xi=xi,
                           basis=basis, A=A, b0=coeffs[0], b=coeffs[1:])


# -- group averaging ------------------------------------------------------

def _merge(acc: dict, terms, scale=None):
    for key, c in terms.items():
        v = c if scale is None else c * scale
        prev = acc.get(key)
        s = v if prev is None else prev + v
        if s.is_zero():
            acc.pop(key, None)
        else:
            acc[key] = s


def _party_runs(word):
    runs, start = [], 0
    for i in range(1, len(word) + 1):
        if i == len(word) or word[i][0] != word[start][0]:
            runs.append(word[start:i])
            start = i
    return runs


class _ElementAction:
    """Cached ring action of one group element on normal words.

    When the element maps each party's generators into a single (distinct)
    target party, images factor over per-party subwords and cross-party
    products are plain concatenations in target-party order.
    """

    def __init__(self, elem, scenario: Scenario):
        self.elem = elem
        self.images = elem.generator_images()
        self.gen_index = scenario.generator_index()
        party_target, consistent = {}, True
        for g, img in zip(scenario.generators(), self.images):
            targets = {w[0][0] for w in img.words() if w}
            if len(targets) > 1:
                consistent = False
                break
            if targets:
                t = targets.pop()
                if party_target.setdefault(g[0], t) != t:
                    consistent = False
                    break
        if consistent:
            mapped = list(party_target.values())
            consistent = len(mapped) == len(set(mapped))
        self.party_target = party_target
        self.consistent = consistent
        self.part_cache = {}
        self.word_cache = {}

    def _part_image(self, part):
        poly = self.part_cache.get(part)
        if poly is None:
            poly = self.images[self.gen_index[part[0]]]
            for g in part[1:]:
                poly = poly * self.images[self.gen_index[g]]
            self.part_cache[part] = poly
        return poly

    def word_image(self, w) -> dict:
        out = self.word_cache.get(w)
        if out is not None:
            return out
        if not w:
            out = {(): ONE}
        elif not self.consistent:
            out = self.elem.apply(NcPolynomial._raw({w: ONE})).terms()
        else:
            parts = [(self.party_target.get(part[0][0], -1), self._part_image(part))
                     for part in _party_runs(w)]
            parts.sort(key=lambda t: t[0])
            out = {(): ONE}
            for _, poly in parts:
                nxt = {}
                for w1, c1 in out.items():
                    for w2, c2 in poly.terms().items():
                        key = w1 + w2
                        v = c1 * c2
                        prev = nxt.get(key)
                        s = v if prev is None else prev + v
                        if s.is_zero():
                            nxt.pop(key, None)
                        else:
                            nxt[key] = s
                out = nxt
        self.word_cache[w] = out
        return out


def _check_representation(ms, group, rho):
    if rho.group.elements != group.elements:
        raise RelaxationError("representation was built on a different group")
    idx = group.element_index()
    Q = list(ms.sequence.entries)
    for g in group.generators:
        R = rho.images[idx[g.inverse()]]
        for i, q in enumerate(Q):
            image = NcPolynomial.zero()
            for j, c in enumerate(R[i]):
                if not c.is_zero():
                    image = image + Q[j] * c
            if g.apply(q) != image:
                raise RelaxationError(
                    "representation inconsistent with the group action on "
                    "the generating sequence")


def symmetrize_moments(ms, group, rho=None) -> SymmetrizedMoments:
    """Average the moment basis over the group and rebuild the structure."""
    scenario = ms.scenario
    if rho is None:
        rho = representation_on(ms.sequence, group)
    else:
        _check_representation(ms, group, rho)

    allowed = {()}
    for row in ms.xi:
        for cell in row:
            for w in cell.words():
                allowed.add(w)
                allowed.add(normal_form(word_adjoint(w)))
    for p in ms.basis:
        for w in p.words():
            allowed.add(w)
            allowed.add(normal_form(word_adjoint(w)))

    actions = [_ElementAction(g, scenario) for g in group.elements]
    order_inv = rational(1, group.order)
    bar_cache = {}

    def bar(word):
        got = bar_cache.get(word)
        if got is not None:
            return got
        wr = normal_form(word_adjoint(word))
        if wr != word and wr in bar_cache:
            out = {normal_form(word_adjoint(u)): c.conj()
                   for u, c in bar_cache[wr].items()}
        else:
            acc = {}
            for act in actions:
                _merge(acc, act.word_image(word))
            out = {u: c * order_inv for u, c in acc.items()}
        for u in out:
            if u not in allowed:
                raise RelaxationError(
                    f"moment span is not closed under the group: the average "
                    f"of {word_str(word)} contains {word_str(u)}")
        bar_cache[word] = out
        return out

    # The averaged rows are self-adjoint, so they live in a real vector
    # space with one real and one imaginary coordinate per adjoint-pair of
    # words.  Eliminating in those coordinates keeps every pivot polynomial
    # self-adjoint and makes w and W real by construction.
    def real_coords(row):
        out, seen = {}, set()
        for w in row:
            wr = normal_form(word_adjoint(w))
            wc = w if monomial_key(w) <= monomial_key(wr) else wr
            if wc in seen:
                continue
            seen.add(wc)
            c = row.get(wc)
            if c is None:
                c = row[normal_form(word_adjoint(wc))].conj()
            x = (c + c.conj()) * _HALF
            y = (c - c.conj()) * _MINUS_I_HALF
            if not x.is_zero():
                out[(0, wc)] = x
            if not y.is_zero():
                out[(1, wc)] = y
        return out

    def poly_from_real(rrow):
        terms = {}
        for wc in {key[1] for key in rrow}:
            c = rrow.get((0, wc), ZERO) + rrow.get((1, wc), ZERO) * I_UNIT
            wr = normal_form(word_adjoint(wc))
            terms[wc] = terms.get(wc, ZERO) + c
            if wr != wc:
                terms[wr] = terms.get(wr, ZERO) + c.conj()
        return NcPolynomial(terms)

    pivot_order = lambda key: (monomial_key(key[1]), key[0])
    pivots = []
    w_vec, w_rows = [], []
    for mk in ms.basis[1:]:
        row = {}
        for word, c in mk.terms().items():
            _merge(row, bar(word), c)
        rrow = real_coords(row)
        w_vec.append(rrow.pop((0, ()), ZERO))
        coeffs = {}
        for ell, (pk, prow) in enumerate(pivots):
            c = rrow.get(pk)
            if c is not None and not c.is_zero():
                _merge(rrow, prow, -c)
                rrow.pop(pk, None)
                coeffs[ell] = c
        if rrow:
            pk = min(rrow, key=pivot_order)
            scale = rrow[pk]
            inv = scale.inverse()
            pivots.append((pk, {u: c * inv for u, c in rrow.items()}))
            coeffs[len(pivots) - 1] = scale
        w_rows.append(coeffs)
    mt = len(pivots)
    W = [[coeffs.get(ell, ZERO) for ell in range(mt)] for coeffs in w_rows]

    tilde = [poly_from_real(prow) for _, prow in pivots]
    for p in tilde:
        if not p.is_self_adjoint():
            raise RelaxationError("averaged basis element is not self-adjoint")

    a0p = dict(ms.A[0])
    for k, wk in enumerate(w_vec):
        if not wk.is_zero():
            _merge(a0p, ms.A[k + 1], wk)
    aprime = [a0p]
    for ell in range(mt):
        acc = {}
        for k in range(len(w_vec)):
            c = W[k][ell]
            if not c.is_zero():
                _merge(acc, ms.A[k + 1], c)
        aprime.append(acc)

    tb0 = ms.b0
    for bk, wk in zip(ms.b, w_vec):
        tb0 = tb0 + bk * wk
    tb = []
    for ell in range(mt):
        s = ZERO
        for k, bk in enumerate(ms.b):
            s = s + bk * W[k][ell]
        tb.append(s)

    n = ms.size
    xibar = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = {}
            for word, c in ms.xi[i][j].terms().items():
                _merge(acc, bar(word), c)
            row.append(NcPolynomial(acc))
        xibar.append(row)

    return SymmetrizedMoments(
        scenario=scenario, sequence=ms.sequence, group=group, rho=rho,
        xi=xibar, basis=[NcPolynomial.one()] + tilde, A=aprime,
        b0=tb0, b=tb, w=w_vec, W=W)


def average_polynomial(p: NcPolynomial, group) -> NcPolynomial:
    """Plain group average of a ring element (reference implementation)."""
    total = NcPolynomial.zero()
    for g in group.elements:
        total = total + g.apply(p)
    return total * rational(1, group.order)
