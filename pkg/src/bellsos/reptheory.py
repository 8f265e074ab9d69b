"""Irreducible representations and isotypic decomposition of group actions.

The change of basis is built from Serre projectors: for an irrep sigma of
dimension d, P_ab = (d/|G|) sum_g sigma(g^-1)_ba rho_g, and rank(P_00) is the
multiplicity of sigma inside rho.  Lining up (h_j, P_01 h_j, ..., P_0,d-1 h_j)
for the leftmost independent columns h_j of P_00, and concatenating over all
irreps, gives an invertible I with rho_g = I (⊕_i 1_{m_i} ⊗ sigma_g^(i)) I^-1.

Hermitian matrices invariant under the action then split into small blocks:

    I^dag Xbar I    = ⊕_i (1/d_i) Xtilde^(i) ⊗ C_i     (Xbar = rho^dag Xbar rho)
    I^-1 Zbar I^-dag = ⊕_i Ztilde^(i) ⊗ C_i^-1          (Zbar = rho Zbar rho^dag)

where C_i = (1/|G|) sum_g sigma_g^dag sigma_g is Hermitian positive definite
(the identity whenever sigma is unitary), so Xbar >= 0 iff every Xtilde^(i)
is, and likewise for Zbar.  Built-in irrep families cover the dihedral groups
of order 8d and abelian groups; everything stays in exact arithmetic whenever
the irrep entries lie in the supported square-root towers, and falls back to
complex floating point otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

from .exactfield import (I_UNIT, ONE, ZERO, AlgebraicScalar, FieldError,
                         exact_root_of_unity, rational, to_float)
from .linalg import (adjoint, freeze, identity, mat_add, mat_eq, mat_inverse,
                     mat_mul, mat_scale, mat_vec, rref, trace, zeros)


class RepTheoryError(Exception):
    pass


_HALF = rational(1, 2)


@dataclass(frozen=True)
class Irrep:
    """Irreducible representation given by one image matrix per group
    generator (ordered like FiniteGroup.generators).  Exact irreps carry
    AlgebraicScalar matrices; numeric ones (exact=False) numpy arrays."""

    label: str
    dimension: int
    images: tuple
    exact: bool = True


def dihedral_irreps(d: int) -> list:
    """The 2d+3 irreps of <a, x | a^(4d) = x^2 = (xa)^2 = 1> (order 8d), as
    images of (a, x): four sign characters followed by 2d-1 two-dimensional
    rotation/reflection pairs with rotation angle 2*pi*k/(4d).  The
    two-dimensional family is exact when 4d divides 24 (the angle's cosine
    then lies in the square-root towers) and numeric otherwise."""
    if d < 1:
        raise RepTheoryError(f"dihedral order parameter must be >= 1, got {d}")
    irreps = []
    for i, (sa, sx) in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)], 1):
        irreps.append(Irrep(f"sigma{i}", 1,
                            (((rational(sa),),), ((rational(sx),),))))
    exact = 24 % (4 * d) == 0
    for k in range(1, 2 * d):
        if exact:
            z = exact_root_of_unity(k, 4 * d)
            c = (z + z.conj()) * _HALF
            s = (z - z.conj()) * _HALF * (-I_UNIT)
            rot = ((c, -s), (s, c))
            refl = ((ONE, ZERO), (ZERO, -ONE))
        else:
            import numpy as np
            th = 2 * math.pi * k / (4 * d)
            rot = np.array([[math.cos(th), -math.sin(th)],
                            [math.sin(th), math.cos(th)]], dtype=complex)
            refl = np.array([[1, 0], [0, -1]], dtype=complex)
        irreps.append(Irrep(f"sigma{k + 4}", 2, (rot, refl), exact))
    return irreps


def abelian_character_irreps(group) -> list:
    """All one-dimensional characters of an abelian group, found by assigning
    each generator a root of unity of its own order and keeping assignments
    consistent with the multiplication table.  Exact when every generator
    order divides 24."""
    gens = group.generators
    ident = group.elements[0]
    idx = group.element_index()
    orders = []
    for g in gens:
        p, o = g, 1
        while p != ident:
            p, o = p * g, o + 1
        orders.append(o)
    exact = all(24 % o == 0 for o in orders)
    if exact:
        choices = [[exact_root_of_unity(j, o) for j in range(o)]
                   for o in orders]
        one = ONE
    else:
        choices = [[complex(math.cos(2 * math.pi * j / o),
                            math.sin(2 * math.pi * j / o)) for j in range(o)]
                   for o in orders]
        one = 1 + 0j
    chars = []
    for exps in iter_product(*[range(o) for o in orders]):
        gen_vals = [choices[t][exps[t]] for t in range(len(gens))]
        vals = []
        for word in group.words:
            v = one
            for gi in word:
                v = v * gen_vals[gi]
            vals.append(v)
        consistent = all(
            _scalar_close(vals[ei] * gen_vals[t], vals[idx[elem * g]], exact)
            for ei, elem in enumerate(group.elements)
            for t, g in enumerate(gens))
        if consistent:
            label = "chi(" + ",".join(map(str, exps)) + ")"
            images = tuple(((v,),) for v in gen_vals)
            chars.append(Irrep(label, 1, images, exact))
    if len(chars) != group.order:
        raise RepTheoryError(
            f"found {len(chars)} characters for a group of order "
            f"{group.order}; the group is not abelian")
    return chars


def _scalar_close(a, b, exact):
    if exact:
        return a == b
    return abs(a - b) < 1e-9


def irrep_element_images(sigma: Irrep, group) -> list:
    """sigma_g for every group element, multiplying generator images along
    each element's defining word (the homomorphism convention shared with
    representation_on).  Raises if the images violate the group relations."""
    if len(sigma.images) != len(group.generators):
        raise RepTheoryError(
            f"irrep {sigma.label} supplies {len(sigma.images)} generator "
            f"images but the group has {len(group.generators)} generators")
    if sigma.exact:
        gens = [freeze(m) for m in sigma.images]
        out = [freeze(identity(sigma.dimension))]
        for word in group.words[1:]:
            m = gens[word[0]]
            for gi in word[1:]:
                m = mat_mul(m, gens[gi])
            out.append(freeze(m))
    else:
        import numpy as np
        gens = [np.asarray(m, dtype=complex) for m in sigma.images]
        out = [np.eye(sigma.dimension, dtype=complex)]
        for word in group.words[1:]:
            m = gens[word[0]]
            for gi in word[1:]:
                m = m @ gens[gi]
            out.append(m)
    idx = group.element_index()
    for ei, elem in enumerate(group.elements):
        for t, g in enumerate(group.generators):
            lhs = mat_mul(out[ei], gens[t]) if sigma.exact \
                else out[ei] @ gens[t]
            if not _mats_close(lhs, out[idx[elem * g]], sigma.exact):
                raise RepTheoryError(
                    f"irrep {sigma.label} is inconsistent with the group "
                    f"relations (images fail to extend to a homomorphism)")
    return out


def _mats_close(a, b, exact, tol=1e-9):
    if exact:
        return mat_eq(a, b)
    import numpy as np
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) < tol


def _numeric_matrix(m):
    import numpy as np
    if isinstance(m, np.ndarray):
        return m.astype(complex)
    return np.array([[complex(to_float(e)) if isinstance(e, AlgebraicScalar)
                      else complex(e) for e in row] for row in m])


def _is_exact_matrix(m):
    return not hasattr(m, "dtype") and \
        all(isinstance(e, AlgebraicScalar) for row in m for e in row)


def serre_projectors(rho, sigma: Irrep):
    """The d x d table P[a][b] = (d/|G|) sum_g sigma(g^-1)_ba rho_g.  P[0][0]
    is idempotent and its rank is the multiplicity of sigma inside rho."""
    group = rho.group
    sig = irrep_element_images(sigma, group)
    if sigma.exact:
        rho_imgs = list(rho.images)
    else:
        rho_imgs = [_numeric_matrix(m) for m in rho.images]
    d = sigma.dimension
    return [[_serre_sum(rho_imgs, sig, group, a, b, d, sigma.exact)
             for b in range(d)] for a in range(d)]


def _serre_sum(rho_imgs, sig, group, a, b, dim, exact):
    inv = group.inverse_indices()
    if exact:
        n = len(rho_imgs[0])
        acc = zeros(n, n)
        for gi, rg in enumerate(rho_imgs):
            wgt = sig[inv[gi]][b][a]
            if wgt.is_zero():
                continue
            acc = mat_add(acc, mat_scale(rg, wgt))
        return freeze(mat_scale(acc, rational(dim, group.order)))
    import numpy as np
    acc = sum(sig[inv[gi]][b, a] * rg for gi, rg in enumerate(rho_imgs))
    return np.asarray(acc) * (dim / group.order)


@dataclass
class IsotypicComponent:
    irrep: Irrep
    multiplicity: int
    inject: object        # n x (m*d) vertical slice of the change of basis
    project: object       # (m*d) x n horizontal slice of its inverse
    unitarizer: object    # C = (1/|G|) sum_g sigma_g^dag sigma_g
    unitarizer_inverse: object
    offset: int           # column offset inside the change of basis


@dataclass
class IsotypicDecomposition:
    rho: object
    components: list
    change_of_basis: object   # I, with rho_g = I (⊕ 1_m ⊗ sigma_g) I^-1
    inverse: object
    exact: bool

    @property
    def multiplicities(self) -> tuple:
        return tuple(c.multiplicity for c in self.components)

    @property
    def dim(self) -> int:
        return len(self.change_of_basis)


def decompose(rho, irreps) -> IsotypicDecomposition:
    """Isotypic decomposition of a representation over the given complete
    list of its irreps (entries of multiplicity zero are fine and keep their
    place in .components)."""
    group = rho.group
    n = rho.dim
    exact = all(ir.exact for ir in irreps)
    if exact:
        rho_imgs = list(rho.images)
    else:
        import numpy as np
        rho_imgs = [_numeric_matrix(m) for m in rho.images]
    pieces = []
    offset = 0
    for ir in irreps:
        sig = irrep_element_images(ir, group)
        if not exact and ir.exact:
            sig = [_numeric_matrix(m) for m in sig]
        d = ir.dimension
        # maps P_a0 carrying the top copy of the irrep onto the others;
        # the columns (h, P_10 h, ..., P_d-1,0 h) then intertwine exactly
        col0 = [_serre_sum(rho_imgs, sig, group, a, 0, d, exact)
                for a in range(d)]
        p00 = col0[0]
        if exact:
            _, piv = rref(p00)
            hs = [[p00[r][j] for r in range(n)] for j in piv]
            cols = []
            for h in hs:
                cols.append(h)
                cols.extend(mat_vec(col0[a], h) for a in range(1, d))
        else:
            piv = _independent_columns(p00)
            cols = []
            for j in piv:
                h = p00[:, j]
                cols.append(h)
                cols.extend(col0[a] @ h for a in range(1, d))
        pieces.append((ir, len(piv), sig, offset, cols))
        offset += len(piv) * d
    if offset != n:
        if offset < n:
            raise RepTheoryError(
                f"missing irreps: residual dimension {n - offset}")
        raise RepTheoryError(
            f"irreps overcount the representation by {offset - n} "
            f"dimensions (equivalent irreps listed twice?)")
    if exact:
        cob = [[col[r] for _, _, _, _, cols in pieces for col in cols]
               for r in range(n)]
        try:
            inv = mat_inverse(cob)
        except ZeroDivisionError:
            raise RepTheoryError("change of basis is singular; the supplied "
                                 "irreps do not decompose this "
                                 "representation") from None
    else:
        import numpy as np
        cob = np.column_stack([col for _, _, _, _, cols in pieces
                               for col in cols])
        svals = np.linalg.svd(cob, compute_uv=False)
        if svals[-1] < 1e-9 * svals[0]:
            raise RepTheoryError("change of basis is singular; the supplied "
                                 "irreps do not decompose this "
                                 "representation")
        inv = np.linalg.inv(cob)
    components = []
    for ir, m_i, sig, off, _ in pieces:
        d = ir.dimension
        if exact:
            c_mat = zeros(d, d)
            for s in sig:
                c_mat = mat_add(c_mat, mat_mul(adjoint(s), s))
            c_mat = mat_scale(c_mat, rational(1, group.order))
            c_inv = mat_inverse(c_mat)
            inj = freeze([[cob[r][off + c] for c in range(m_i * d)]
                          for r in range(n)]) if m_i else ()
            prj = freeze([inv[off + r] for r in range(m_i * d)]) if m_i else ()
        else:
            import numpy as np
            c_mat = sum(s.conj().T @ s for s in sig) / group.order
            c_inv = np.linalg.inv(c_mat)
            inj = cob[:, off:off + m_i * d]
            prj = inv[off:off + m_i * d, :]
        components.append(IsotypicComponent(
            ir, m_i, inj, prj, c_mat, c_inv, off))
    dec = IsotypicDecomposition(
        rho, components, freeze(cob) if exact else cob,
        freeze(inv) if exact else inv, exact)
    _check_intertwining(dec, group)
    return dec


def _independent_columns(mat, tol: float = 1e-9) -> list:
    """Leftmost independent columns by greedy Gram-Schmidt."""
    import numpy as np
    pivots, basis = [], []
    for j in range(mat.shape[1]):
        v = mat[:, j].astype(complex).copy()
        nv0 = np.linalg.norm(v)
        for b in basis:
            v -= (b.conj() @ v) * b
        if np.linalg.norm(v) > tol * max(1.0, nv0):
            pivots.append(j)
            basis.append(v / np.linalg.norm(v))
    return pivots


def _block_sigma(dec: IsotypicDecomposition, gen_index: int):
    """⊕_i 1_{m_i} ⊗ sigma^(i) image of the given generator."""
    if dec.exact:
        from .linalg import kron
        n = dec.dim
        out = zeros(n, n)
        for comp in dec.components:
            if not comp.multiplicity:
                continue
            blk = kron(identity(comp.multiplicity),
                       comp.irrep.images[gen_index])
            for r in range(len(blk)):
                for c in range(len(blk)):
                    out[comp.offset + r][comp.offset + c] = blk[r][c]
        return out
    import numpy as np
    n = dec.dim
    out = np.zeros((n, n), dtype=complex)
    for comp in dec.components:
        if not comp.multiplicity:
            continue
        img = _numeric_matrix(comp.irrep.images[gen_index]) \
            if comp.irrep.exact else comp.irrep.images[gen_index]
        blk = np.kron(np.eye(comp.multiplicity), img)
        sz = blk.shape[0]
        out[comp.offset:comp.offset + sz, comp.offset:comp.offset + sz] = blk
    return out


def _check_intertwining(dec: IsotypicDecomposition, group) -> None:
    idx = group.element_index()
    for gi, g in enumerate(group.generators):
        rg = dec.rho.images[idx[g]]
        big = _block_sigma(dec, gi)
        if dec.exact:
            ok = mat_eq(mat_mul(rg, dec.change_of_basis),
                        mat_mul(dec.change_of_basis, big))
        else:
            rg = _numeric_matrix(rg)
            ok = _mats_close(rg @ dec.change_of_basis,
                             dec.change_of_basis @ big, False)
        if not ok:
            raise RepTheoryError(
                f"change of basis fails rho_g I = I sigma_g on generator "
                f"{gi}; the supplied irreps do not match this representation")


# -- block projection of invariant Hermitian matrices ---------------------

def project_x_side(dec: IsotypicDecomposition, xbar, check: bool = True):
    """Blocks Xtilde^(i) of I^dag Xbar I = ⊕ (1/d_i) Xtilde^(i) ⊗ C_i, for
    Xbar invariant as Xbar = rho_g^dag Xbar rho_g."""
    return _project(dec, xbar, "x", check)


def project_z_side(dec: IsotypicDecomposition, zbar, check: bool = True):
    """Blocks Ztilde^(i) of I^-1 Zbar I^-dag = ⊕ Ztilde^(i) ⊗ C_i^-1, for
    Zbar invariant as Zbar = rho_g Zbar rho_g^dag."""
    return _project(dec, zbar, "z", check)


def block_project_psd_pair(dec: IsotypicDecomposition, xbar, zbar,
                           check: bool = True):
    """Project an invariant pair; Xbar >= 0 iff all Xtilde^(i) >= 0 and
    Zbar >= 0 iff all Ztilde^(i) >= 0."""
    return (project_x_side(dec, xbar, check),
            project_z_side(dec, zbar, check))


def _project(dec, mat, side, check):
    exact = dec.exact and _is_exact_matrix(mat)
    if exact:
        cob, inv = dec.change_of_basis, dec.inverse
    else:
        import numpy as np
        mat = _numeric_matrix(mat)
        cob = _numeric_matrix(dec.change_of_basis) if dec.exact \
            else dec.change_of_basis
        inv = _numeric_matrix(dec.inverse) if dec.exact else dec.inverse
    if check:
        _check_invariance(dec, mat, side, exact)
    if exact:
        if side == "x":
            full = mat_mul(mat_mul(adjoint(cob), mat), cob)
        else:
            full = mat_mul(mat_mul(inv, mat), adjoint(inv))
    else:
        if side == "x":
            full = cob.conj().T @ mat @ cob
        else:
            full = inv @ mat @ inv.conj().T
    blocks = []
    for comp in dec.components:
        d = comp.irrep.dimension
        m = comp.multiplicity
        if exact:
            weight = comp.unitarizer_inverse if side == "x" \
                else comp.unitarizer
            blk = zeros(m, m)
            for j in range(m):
                for k in range(m):
                    sub = [[full[comp.offset + j * d + r][comp.offset + k * d + c]
                            for c in range(d)] for r in range(d)]
                    val = trace(mat_mul(sub, weight))
                    if side == "z":
                        val = val * rational(1, d)
                    blk[j][k] = val
            blocks.append(freeze(blk))
        else:
            import numpy as np
            weight = _numeric_matrix(comp.unitarizer_inverse if side == "x"
                                     else comp.unitarizer)
            blk = np.zeros((m, m), dtype=complex)
            for j in range(m):
                for k in range(m):
                    sub = full[comp.offset + j * d:comp.offset + (j + 1) * d,
                               comp.offset + k * d:comp.offset + (k + 1) * d]
                    val = np.trace(sub @ weight)
                    blk[j, k] = val / d if side == "z" else val
            blocks.append(blk)
    if check:
        rebuilt = _assemble_full(dec, blocks, side, exact)
        if exact:
            ok = mat_eq(rebuilt, full)
        else:
            import numpy as np
            scale = max(1.0, np.max(np.abs(full)))
            ok = np.max(np.abs(rebuilt - full)) < 1e-12 * scale
        if not ok:
            raise RepTheoryError(
                "projection left a nonzero off-block residual; the matrix "
                "does not live in the invariant block structure")
    return blocks


def _check_invariance(dec, mat, side, exact):
    group = dec.rho.group
    idx = group.element_index()
    for g in group.generators:
        rg = dec.rho.images[idx[g]]
        if exact:
            conj = mat_mul(mat_mul(adjoint(rg), mat), rg) if side == "x" \
                else mat_mul(mat_mul(rg, mat), adjoint(rg))
            ok = mat_eq(conj, mat)
        else:
            rg = _numeric_matrix(rg)
            conj = rg.conj().T @ mat @ rg if side == "x" \
                else rg @ mat @ rg.conj().T
            import numpy as np
            scale = max(1.0, np.max(np.abs(mat)))
            ok = np.max(np.abs(conj - mat)) < 1e-9 * scale
        if not ok:
            want = "rho^dag X rho = X" if side == "x" else "rho Z rho^dag = Z"
            raise RepTheoryError(
                f"matrix is not invariant under the group action "
                f"(expected {want})")


def _assemble_full(dec, blocks, side, exact):
    """⊕_i blocks_i ⊗ C-factor, with the x-side 1/d_i normalization."""
    n = dec.dim
    if exact:
        from .linalg import kron
        out = zeros(n, n)
        for comp, blk in zip(dec.components, blocks):
            if not comp.multiplicity:
                continue
            d = comp.irrep.dimension
            weight = comp.unitarizer if side == "x" \
                else comp.unitarizer_inverse
            piece = kron(blk, weight)
            if side == "x":
                piece = mat_scale(piece, rational(1, d))
            for r in range(len(piece)):
                for c in range(len(piece)):
                    out[comp.offset + r][comp.offset + c] = piece[r][c]
        return out
    import numpy as np
    out = np.zeros((n, n), dtype=complex)
    for comp, blk in zip(dec.components, blocks):
        if not comp.multiplicity:
            continue
        d = comp.irrep.dimension
        weight = _numeric_matrix(comp.unitarizer if side == "x"
                                 else comp.unitarizer_inverse)
        piece = np.kron(_numeric_matrix(blk), weight)
        if side == "x":
            piece = piece / d
        sz = piece.shape[0]
        out[comp.offset:comp.offset + sz, comp.offset:comp.offset + sz] = piece
    return out


def unproject_x_blocks(dec: IsotypicDecomposition, blocks):
    """Xbar = I^-dag [⊕ (1/d_i) Xtilde^(i) ⊗ C_i] I^-1."""
    exact = dec.exact and all(
        _is_exact_matrix(b) for b, c in zip(blocks, dec.components)
        if c.multiplicity)
    full = _assemble_full(dec, blocks, "x", exact)
    if exact:
        inv = dec.inverse
        return mat_mul(mat_mul(adjoint(inv), full), inv)
    inv = _numeric_matrix(dec.inverse) if dec.exact else dec.inverse
    return inv.conj().T @ _numeric_full(full) @ inv


def unproject_z_blocks(dec: IsotypicDecomposition, blocks):
    """Zbar = I [⊕ Ztilde^(i) ⊗ C_i^-1] I^dag."""
    exact = dec.exact and all(
        _is_exact_matrix(b) for b, c in zip(blocks, dec.components)
        if c.multiplicity)
    full = _assemble_full(dec, blocks, "z", exact)
    if exact:
        cob = dec.change_of_basis
        return mat_mul(mat_mul(cob, full), adjoint(cob))
    cob = _numeric_matrix(dec.change_of_basis) if dec.exact \
        else dec.change_of_basis
    return cob @ _numeric_full(full) @ cob.conj().T


def _numeric_full(full):
    import numpy as np
    return full if isinstance(full, np.ndarray) else _numeric_matrix(full)
