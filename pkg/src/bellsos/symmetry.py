"""Affine ring automorphisms, finite matrix groups, and representations.

An automorphism is stored as its (N+1)x(N+1) matrix omega acting on the
affine coordinate vector X = (1, g_1, ..., g_N) of the scenario generators:
the ring map sends X_i to (omega^{-1} X)_i and extends multiplicatively.
Composition of maps corresponds to multiplication of the omega matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .exactfield import ONE, ZERO, AlgebraicScalar
from .linalg import (
    express_rows, freeze, identity, mat_conj, mat_eq, mat_inverse, mat_mul,
    matrix, transpose,
)
from .ncalgebra import NcPolynomial, Scenario


class SymmetryError(Exception):
    pass


class AffineAutomorphism:
    """Ring automorphism given by an exact affine matrix on the generators."""

    __slots__ = ("scenario", "omega", "omega_inv", "_images", "_hash")

    def __init__(self, scenario: Scenario, omega):
        n = len(scenario.generators()) + 1
        omega = matrix(omega)
        if len(omega) != n or any(len(row) != n for row in omega):
            raise SymmetryError(f"matrix must be {n}x{n} for this scenario")
        if [x for x in omega[0]] != [ONE] + [AlgebraicScalar.of(0)] * (n - 1):
            raise SymmetryError("first row must be (1, 0, ..., 0)")
        self.scenario = scenario
        self.omega = freeze(omega)
        self.omega_inv = freeze(mat_inverse(omega))
        self._images = None
        self._hash = None

    def generator_images(self) -> list[NcPolynomial]:
        if self._images is None:
            gens = self.scenario.generators()
            images = []
            for i in range(1, len(gens) + 1):
                row = self.omega_inv[i]
                terms = {(): row[0]}
                for j, g in enumerate(gens):
                    terms[(g,)] = row[j + 1]
                images.append(NcPolynomial(terms))
            self._images = images
        return self._images

    def apply(self, p: NcPolynomial) -> NcPolynomial:
        images = self.generator_images()
        index = self.scenario.generator_index()
        total = NcPolynomial.zero()
        for word, coeff in p.terms().items():
            prod = NcPolynomial.constant(coeff)
            for g in word:
                prod = prod * images[index[g]]
            total = total + prod
        return total

    def __mul__(self, other: "AffineAutomorphism") -> "AffineAutomorphism":
        if self.scenario != other.scenario:
            raise SymmetryError("scenario mismatch")
        return AffineAutomorphism(self.scenario, mat_mul(self.omega, other.omega))

    def inverse(self) -> "AffineAutomorphism":
        return AffineAutomorphism(self.scenario, self.omega_inv)

    def __pow__(self, k: int) -> "AffineAutomorphism":
        base = self if k >= 0 else self.inverse()
        out = AffineAutomorphism.identity(self.scenario)
        for _ in range(abs(k)):
            out = out * base
        return out

    @staticmethod
    def identity(scenario: Scenario) -> "AffineAutomorphism":
        return AffineAutomorphism(scenario, identity(len(scenario.generators()) + 1))

    def is_identity(self) -> bool:
        return mat_eq(self.omega, identity(len(self.omega)))

    def __eq__(self, other):
        return (isinstance(other, AffineAutomorphism)
                and self.scenario == other.scenario
                and self.omega == other.omega)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.scenario, self.omega))
        return self._hash

    def __repr__(self):
        return f"AffineAutomorphism({self.scenario}, {len(self.omega)}x{len(self.omega)})"


@dataclass
class FiniteGroup:
    """Finite group of automorphisms enumerated by closure.

    `words[i]` spells elements[i] as a product of generators (indices into
    `generators`), which lets representations defined on the generators be
    propagated to every element."""

    generators: list
    elements: list
    words: list

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    def inverse_indices(self) -> list[int]:
        idx = self.element_index()
        return [idx[g.inverse()] for g in self.elements]


def closure(generators, max_order: int = 10000) -> FiniteGroup:
    if not generators:
        raise SymmetryError("need at least one generator")
    ident = AffineAutomorphism.identity(generators[0].scenario)
    elements = [ident]
    words = [()]
    seen = {ident}
    frontier = [(ident, ())]
    while frontier:
        nxt = []
        for elem, word in frontier:
            for gi, gen in enumerate(generators):
                cand = elem * gen
                if cand not in seen:
                    seen.add(cand)
                    elements.append(cand)
                    words.append(word + (gi,))
                    nxt.append((cand, word + (gi,)))
                    if len(elements) > max_order:
                        raise SymmetryError(f"group order exceeds {max_order}")
        frontier = nxt
    return FiniteGroup(list(generators), elements, words)


def check_invariance(expression, group: FiniteGroup) -> bool:
    """True iff every group generator fixes the expression exactly."""
    poly = expression.polynomial() if hasattr(expression, "polynomial") else expression
    return all(g.apply(poly) == poly for g in group.generators)


@dataclass
class Representation:
    """Exact matrices rho_g aligned with group.elements, acting on a
    generating sequence by g(Q) = rho_g^{-1} Q."""

    group: FiniteGroup
    images: list

    @property
    def dim(self) -> int:
        return len(self.images[0])

    def image_of_inverse(self, i: int) -> tuple:
        return self.images[self.group.inverse_indices()[i]]


def _poly_coords(polys):
    """Common monomial indexing for a list of polynomials."""
    words = sorted({w for p in polys for w in p.words()})
    index = {w: i for i, w in enumerate(words)}
    rows = []
    for p in polys:
        row = [AlgebraicScalar.of(0)] * len(words)
        for w, c in p.terms().items():
            row[index[w]] = c
        rows.append(row)
    return rows, index


def _image_matrix(entries, elem, word_of):
    """Rows expressing elem(Q_i) over the monomial entries."""
    n = len(entries)
    rows = [[AlgebraicScalar.of(0)] * n for _ in range(n)]
    for i, q in enumerate(entries):
        image = elem.apply(q)
        for w, c in image.terms().items():
            j = word_of.get(w)
            if j is None:
                raise SymmetryError(
                    f"sequence not closed under group action: image of "
                    f"entry {i} contains {NcPolynomial({w: ONE})}")
            rows[i][j] = rows[i][j] + c
    return rows


def representation_on(entries, group: FiniteGroup) -> Representation:
    """Representation of the group on the span of the generating sequence."""
    entries = list(entries.entries) if hasattr(entries, "entries") else list(entries)
    n = len(entries)
    if all(len(q.terms()) == 1 and next(iter(q.terms().values())) == ONE
           for q in entries):
        # monomial sequence: coordinates are read off directly, and images
        # of non-generator elements come from the homomorphism property
        word_of = {next(iter(q.words())): i for i, q in enumerate(entries)}
        if len(word_of) != n:
            raise SymmetryError("sequence entries are linearly dependent")
        gen_rho = {}
        for g in group.generators:
            gen_rho[g] = freeze(mat_inverse(_image_matrix(entries, g, word_of)))
        images = []
        for elem, word in zip(group.elements, group.words):
            if not word:
                images.append(freeze(identity(n)))
                continue
            rho = gen_rho[group.generators[word[0]]]
            for gi in word[1:]:
                rho = mat_mul(rho, gen_rho[group.generators[gi]])
            images.append(freeze(rho))
        return Representation(group, images)
    span_rows, index = _poly_coords(entries)
    images = []
    for elem in group.elements:
        target_rows = []
        for i, q in enumerate(entries):
            image = elem.apply(q)
            for w in image.words():
                if w not in index:
                    raise SymmetryError(
                        f"sequence not closed under group action: image of "
                        f"entry {i} contains {NcPolynomial({w: ONE})}")
            row = [AlgebraicScalar.of(0)] * len(index)
            for w, c in image.terms().items():
                row[index[w]] = c
            target_rows.append(row)
        r = express_rows(span_rows, target_rows)
        if r is None:
            raise SymmetryError("sequence entries are linearly dependent or "
                                "image escapes the span")
        images.append(freeze(mat_inverse(r)))
    return Representation(group, images)


def conjugation_reduction(ms):
    """Average a moment structure with its complex conjugate.

    When entrywise conjugation maps the coefficient-matrix span to itself
    with a diagonal +-1 action and fixes A0 and the objective, the moments
    carried by anti-fixed basis elements vanish on average and are removed.
    Otherwise the structure is returned unchanged (conjugation_reduced
    stays False)."""
    a0, rest = ms.A[0], ms.A[1:]
    m = len(rest)
    if isinstance(a0, dict):
        if not all(v.conj() == v for v in a0.values()):
            return ms
        if m == 0:
            return replace(ms, conjugation_reduced=True)
        support = sorted({pos for ak in rest for pos in ak})
        flat = [[ak.get(pos, ZERO) for pos in support] for ak in rest]
    else:
        if not mat_eq(mat_conj(a0), a0):
            return ms
        if m == 0:
            return replace(ms, conjugation_reduced=True)
        flat = [[x for row in ak for x in row] for ak in rest]
    conj_flat = [[x.conj() for x in row] for row in flat]
    # F with A_k^* = sum_j F_{jk} A_j  (columns indexed by k)
    ftrans = express_rows(flat, conj_flat)
    if ftrans is None:
        return ms
    f = transpose(ftrans)
    keep, drop = [], []
    for k in range(m):
        col = [f[j][k] for j in range(m)]
        if all((col[j] == (ONE if j == k else 0)) for j in range(m)):
            keep.append(k)
        elif all((col[j] == (-ONE if j == k else 0)) for j in range(m)):
            drop.append(k)
        else:
            return ms
    if any(not ms.b[k].is_zero() for k in drop):
        return ms  # objective not conjugation-invariant
    # the reduced problem asserts zero moments for the dropped basis
    # elements, so its symbolic matrix is the kept part of sum_k A_k M_k
    n = len(ms.xi)
    xi_new = [[NcPolynomial.zero() for _ in range(n)] for _ in range(n)]
    for k in [0] + [k + 1 for k in keep]:
        ak, mk = ms.A[k], ms.basis[k]
        if isinstance(ak, dict):
            items = ak.items()
        else:
            items = (((i, j), ak[i][j]) for i in range(n) for j in range(n)
                     if not ak[i][j].is_zero())
        for (i, j), c in items:
            xi_new[i][j] = xi_new[i][j] + mk * c
    extra = {}
    if getattr(ms, "W", None) is not None:
        extra["W"] = [[row[k] for k in keep] for row in ms.W]
    return replace(
        ms,
        xi=xi_new,
        basis=[ms.basis[0]] + [ms.basis[k + 1] for k in keep],
        A=[ms.A[0]] + [ms.A[k + 1] for k in keep],
        b=[ms.b[k] for k in keep],
        conjugation_reduced=True,
        **extra,
    )
