"""Block semidefinite programs for the moment/sum-of-squares pair.

A BlockSdpProblem holds block-diagonal Hermitian data matrices A_0..A_m
and an affine objective (b0, b), describing simultaneously

    moment side   max  b0 + b.y   s.t.  Z = A_0 + sum_l y_l A_l  >= 0
    sos side      min  b0 + tr[A_0 X]   s.t.  tr[A_l X] = -b_l,  X >= 0

which are dual to each other.  solve() runs a dense Mehrotra
predictor-corrector interior-point method on the realified blocks, or an
exact vertex-enumeration linear program when every live block is 1x1 and
the data lives in the scalar field.  Complex Hermitian blocks are realified
with the usual doubling embedding (scaled by 1/2 so traces are preserved).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from itertools import combinations

from .exactfield import ZERO, AlgebraicScalar, to_float, to_real_float
from .linalg import solve as exact_solve
from .relaxation import dense_matrix


class SdpError(Exception):
    pass


@dataclass
class BlockSdpProblem:
    """Block-diagonal SDP data; A[l][i] is block i of the l-th matrix."""

    block_sizes: tuple
    A: list
    b0: object
    b: list
    direction: str = "moment-max"
    frozen: frozenset = field(default_factory=frozenset)
    labels: tuple = None

    def __post_init__(self):
        if self.direction not in ("moment-max", "sos-min"):
            raise SdpError(f"unknown direction {self.direction!r}")
        if len(self.A) != len(self.b) + 1:
            raise SdpError("need one data matrix per objective entry plus "
                           "the constant term")
        for al in self.A:
            if len(al) != len(self.block_sizes):
                raise SdpError("data matrices disagree with the block count")
        self.frozen = frozenset(self.frozen)
        if self.labels is None:
            self.labels = tuple(f"B{i}" for i in range(len(self.block_sizes)))

    @property
    def nblocks(self) -> int:
        return len(self.block_sizes)

    @property
    def nvars(self) -> int:
        return len(self.b)

    @property
    def live_blocks(self) -> list:
        return [i for i in range(self.nblocks) if i not in self.frozen]

    @property
    def exact(self) -> bool:
        if not _exact_scalar(self.b0) or not all(map(_exact_scalar, self.b)):
            return False
        return all(_exact_entries(al[i]) for al in self.A
                   for i in range(self.nblocks))


@dataclass
class SdpSolution:
    problem: BlockSdpProblem
    ytilde: list
    xblocks: list
    zblocks: list
    moment_value: object
    sos_value: object
    gap: float
    exact: bool
    iterations: int
    xspectra: tuple = ()
    zspectra: tuple = ()

    @property
    def primal_value(self):
        return self.moment_value if self.problem.direction == "moment-max" \
            else self.sos_value

    @property
    def dual_value(self):
        return self.sos_value if self.problem.direction == "moment-max" \
            else self.moment_value


def _exact_scalar(v) -> bool:
    return isinstance(v, AlgebraicScalar)


def _exact_entries(m) -> bool:
    if hasattr(m, "dtype"):
        return False
    return all(_exact_scalar(v) for row in m for v in row)


def _embed(m):
    import numpy as np
    if hasattr(m, "dtype"):
        return np.asarray(m, dtype=complex)
    return np.array([[complex(to_float(v)) for v in row] for row in m],
                    dtype=complex)


def _real_scalar(v) -> float:
    return to_real_float(v) if _exact_scalar(v) else float(v)


def moment_sdp(ms, direction: str = "moment-max") -> BlockSdpProblem:
    """One-block problem straight from a (symmetrized) moment structure."""
    n = ms.size
    a = [[dense_matrix(ak, n)] for ak in ms.A]
    return BlockSdpProblem((n,), a, ms.b0, list(ms.b), direction)


def symmetric_block_sdp(sm, dec, direction: str = "moment-max",
                        frozen=()) -> BlockSdpProblem:
    """Block-diagonalized problem from a symmetrized moment structure and
    the isotypic decomposition of its representation."""
    from .reptheory import project_z_side
    n = sm.size
    kept = [ci for ci, comp in enumerate(dec.components) if comp.multiplicity]
    sizes = tuple(dec.components[ci].multiplicity for ci in kept)
    labels = tuple(dec.components[ci].irrep.label for ci in kept)
    a = []
    for ak in sm.A:
        blocks = project_z_side(dec, dense_matrix(ak, n))
        a.append([blocks[ci] for ci in kept])
    return BlockSdpProblem(sizes, a, sm.b0, list(sm.b), direction,
                           frozenset(frozen), labels)


def restrict_blocks(problem: BlockSdpProblem, zero_blocks) -> BlockSdpProblem:
    """Force X blocks to zero (and drop their PSD constraint on the moment
    side).  The caller is responsible for re-solving and checking that the
    optimum is preserved."""
    zero_blocks = frozenset(zero_blocks)
    for i in zero_blocks:
        if not 0 <= i < problem.nblocks:
            raise SdpError(f"block index {i} out of range")
    return replace(problem, frozen=problem.frozen | zero_blocks)


def zero_block_experiment(problem: BlockSdpProblem, tol: float = 1e-9,
                          rel_change: float = 1e-6):
    """Freeze X blocks to zero while the optimum is preserved.

    Alternates two moves until nothing changes: batch-freeze every block
    whose X is numerically zero at the current solution, and greedily try
    freezing one further block at a time.  Every tentative restriction is
    re-solved and kept only when the optimum moves by less than rel_change
    (relative); restrictions that make the problem infeasible or kill the
    solver are rejected.  Returns (restricted problem, solution, frozen)."""
    base = solve(problem, tol)
    ref = _as_float(base.sos_value)
    current, best = problem, base

    def accept(trial):
        nonlocal current, best
        try:
            sol = solve(trial, tol)
        except SdpError:
            return False
        if abs(_as_float(sol.sos_value) - ref) <= rel_change * (1 + abs(ref)):
            current, best = trial, sol
            return True
        return False

    changed = True
    while changed:
        changed = False
        zeroish = [i for i in current.live_blocks
                   if _block_norm(best.xblocks[i]) <= 1e-6 * (1 + abs(ref))]
        if zeroish and accept(restrict_blocks(current, zeroish)):
            changed = True
            continue
        for i in zeroish:
            if accept(restrict_blocks(current, {i})):
                changed = True
        if changed:
            continue
        for i in list(current.live_blocks):
            if accept(restrict_blocks(current, {i})):
                changed = True
                break
    return current, best, current.frozen


def _block_norm(block) -> float:
    if hasattr(block, "dtype"):
        import numpy as np
        return float(np.max(np.abs(block))) if block.size else 0.0
    return max((abs(to_float(v)) for row in block for v in row), default=0.0)


# -- exact linear-programming path ------------------------------------------

def _exact_sign(v: AlgebraicScalar) -> int:
    if v.is_zero():
        return 0
    return 1 if to_real_float(v) > 0 else -1


def _exact_lp(problem: BlockSdpProblem) -> SdpSolution:
    """Exact solve when all live blocks are 1x1.

    The sos side is a standard-form linear program (min a0.x subject to
    coef.x = -b, x >= 0), so when its optimum exists it is attained at a
    basic solution; those are enumerated exactly over support subsets.  A
    matching moment vector y comes from complementary slackness (the z
    entries vanish on the support of x), which also covers optimal faces
    without vertices."""
    live = problem.live_blocks
    nv = problem.nvars
    coef = [[problem.A[l + 1][i][0][0] for l in range(nv)] for i in live]
    const = [problem.A[0][i][0][0] for i in live]
    k = len(live)

    if nv == 0 and any(_exact_sign(v) < 0 for v in const):
        raise SdpError("problem is infeasible: the constant matrix is not "
                       "positive semidefinite")

    best = None  # (x dict over positions, exact value)
    max_support = min(nv, k) if nv else 0
    for size in range(max_support + 1):
        for supp in combinations(range(k), size):
            if nv:
                mat = [[coef[pos][l] for pos in supp] for l in range(nv)]
                rhs = [[-problem.b[l]] for l in range(nv)]
                sol = exact_solve(mat, rhs) if supp else (
                    [] if all(v.is_zero() for v in problem.b) else None)
                if sol is None:
                    continue
                x = {pos: sol[j][0] for j, pos in enumerate(supp)}
            else:
                x = {}
            if any(_exact_sign(v) < 0 for v in x.values()):
                continue
            dval = problem.b0
            for pos, v in x.items():
                dval = dval + const[pos] * v
            if best is None or _exact_sign(dval - best[1]) < 0:
                best = (x, dval)
    if best is None:
        raise SdpError("the sum-of-squares side is infeasible; the moment "
                       "program is unbounded or infeasible")
    x, dval = best

    def z_values(y):
        out = []
        for pos in range(k):
            z = const[pos]
            for l in range(nv):
                z = z + coef[pos][l] * y[l]
            out.append(z)
        return out

    supp = sorted(pos for pos, v in x.items() if not v.is_zero())
    y_final = z_final = None
    rest = [pos for pos in range(k) if pos not in supp]
    for extra in range(len(rest) + 1):
        for more in combinations(rest, extra):
            active = supp + list(more)
            eqs = [[coef[pos][l] for l in range(nv)] for pos in active]
            rhs = [[-const[pos]] for pos in active]
            eqs.append(list(problem.b))
            rhs.append([dval - problem.b0])
            sol = exact_solve(eqs, rhs) if nv else ([] if all(
                r[0].is_zero() for r, e in zip(rhs, eqs)) else None)
            if sol is None:
                continue
            y = [row[0] for row in sol]
            z = z_values(y)
            if all(_exact_sign(v) >= 0 for v in z):
                y_final, z_final = y, z
                break
        if y_final is not None:
            break
    if y_final is None:
        raise SdpError("no moment vector certifies the sum-of-squares "
                       "optimum; the problem is degenerate")

    pval = problem.b0
    for l in range(nv):
        pval = pval + problem.b[l] * y_final[l]
    if not (pval - dval).is_zero():
        raise SdpError("exact linear program failed strong duality; "
                       "inconsistent data")
    xblocks, zblocks = [], []
    zmap = {live[pos]: z_final[pos] for pos in range(k)}
    xmap = {live[pos]: v for pos, v in x.items()}
    for i in range(problem.nblocks):
        xblocks.append(((xmap.get(i, ZERO),),))
        if i in zmap:
            zblocks.append(((zmap[i],),))
        else:
            zv = problem.A[0][i][0][0]
            for l in range(nv):
                zv = zv + problem.A[l + 1][i][0][0] * y_final[l]
            zblocks.append(((zv,),))
    xsp = tuple((to_real_float(b[0][0]),) for b in xblocks)
    zsp = tuple((to_real_float(b[0][0]),) for b in zblocks)
    return SdpSolution(problem, list(y_final), xblocks, zblocks,
                       pval, dval, 0.0, True, 0, xsp, zsp)


# -- numeric interior-point path --------------------------------------------

def _realify(a):
    import numpy as np
    return 0.5 * np.block([[a.real, -a.imag], [a.imag, a.real]])


def _derealify(xr, m):
    import numpy as np
    j = np.block([[np.zeros((m, m)), -np.eye(m)],
                  [np.eye(m), np.zeros((m, m))]])
    xs = (xr + j @ xr @ j.T) / 2
    x = xs[:m, :m] + 1j * xs[m:, :m]
    return (x + x.conj().T) / 2


def _standardize(problem: BlockSdpProblem):
    """Realified standard-form data (C, A, b) over the live blocks."""
    import numpy as np
    live = problem.live_blocks
    data = [[_embed(problem.A[l][i]) for i in live]
            for l in range(problem.nvars + 1)]
    complex_block = [any(np.max(np.abs(data[l][pos].imag)) > 0
                         for l in range(problem.nvars + 1))
                     for pos in range(len(live))]

    def prep(a, pos):
        return _realify(a) if complex_block[pos] else np.real(a).copy()

    cmats = [prep(data[0][pos], pos) for pos in range(len(live))]
    amats = [[prep(data[l + 1][pos], pos) for pos in range(len(live))]
             for l in range(problem.nvars)]
    bvec = np.array([-_real_scalar(v) for v in problem.b], dtype=float)
    return live, complex_block, cmats, amats, bvec, data


def _prune_constraints(amats, bvec, nv):
    """Indices of a maximal independent subset of the trace constraints.

    Freezing blocks can make the remaining constraints linearly dependent;
    dependent rows are dropped after checking that their right-hand sides
    are implied (otherwise the problem is infeasible)."""
    import numpy as np
    if nv == 0:
        return []
    rows = np.array([np.concatenate([a.ravel() for a in amats[l]])
                     if amats[l] else np.zeros(1) for l in range(nv)])
    keep, basis = [], []
    dropped = []
    for l in range(nv):
        v = rows[l].copy()
        norm0 = np.linalg.norm(v)
        for u in basis:
            v -= (u @ rows[l]) * u
        if np.linalg.norm(v) > 1e-10 * max(norm0, 1.0):
            keep.append(l)
            basis.append(v / np.linalg.norm(v))
        else:
            dropped.append(l)
    if dropped:
        kept_rows = rows[keep]
        scale = 1.0 + np.max(np.abs(bvec))
        for l in dropped:
            coeff, *_ = np.linalg.lstsq(kept_rows.T, rows[l], rcond=None)
            if abs(bvec[l] - coeff @ bvec[keep]) > 1e-8 * scale:
                raise SdpError(
                    "constraints are linearly dependent with inconsistent "
                    "right-hand sides; the restricted sum-of-squares "
                    "problem is infeasible")
    return keep


def _max_step(block, direction) -> float:
    import numpy as np
    l = np.linalg.cholesky(block)
    w = np.linalg.solve(l, np.linalg.solve(l, direction).T).T
    lam = np.linalg.eigvalsh((w + w.T) / 2)[0]
    if lam >= 0:
        return np.inf
    return -1.0 / lam


def _ipm(problem: BlockSdpProblem, tol: float,
         max_iterations: int) -> SdpSolution:
    import numpy as np
    live, complex_block, cmats, amats, bvec, data = _standardize(problem)
    keep = _prune_constraints(amats, bvec, problem.nvars)
    amats = [amats[l] for l in keep]
    bvec = bvec[keep]
    nv = len(keep)
    sizes = [c.shape[0] for c in cmats]
    ntot = sum(sizes) if sizes else 1

    scale = max([1.0] + [np.max(np.abs(c)) for c in cmats]
                + [np.max(np.abs(a)) for row in amats for a in row]
                + ([np.max(np.abs(bvec))] if nv else []))
    x = [scale * np.eye(n) for n in sizes]
    s = [scale * np.eye(n) for n in sizes]
    y = np.zeros(nv)

    def a_apply(mats):
        return np.array([sum(np.sum(amats[l][p] * mats[p])
                             for p in range(len(sizes)))
                         for l in range(nv)])

    def a_adjoint(vec):
        return [sum(vec[l] * amats[l][p] for l in range(nv))
                if nv else np.zeros((sizes[p], sizes[p]))
                for p in range(len(sizes))]

    bnorm = 1.0 + (np.linalg.norm(bvec) if nv else 0.0)
    cnorm = 1.0 + max([np.max(np.abs(c)) for c in cmats] + [0.0])
    status = None
    for it in range(1, max_iterations + 1):
        mu = sum(np.sum(xi * si) for xi, si in zip(x, s)) / ntot
        ay = a_adjoint(y)
        rd = [cmats[p] - s[p] - ay[p] for p in range(len(sizes))]
        rp = bvec - a_apply(x) if nv else np.zeros(0)
        pobj = sum(np.sum(cmats[p] * x[p]) for p in range(len(sizes)))
        dobj = float(bvec @ y) if nv else 0.0
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / bnorm
        dinf = max([np.linalg.norm(r) for r in rd] + [0.0]) / cnorm
        if relgap <= tol and pinf <= tol and dinf <= tol:
            status = "optimal"
            break
        if max(np.trace(xi).real for xi in x) > 1e12 * scale or \
                (nv and np.max(np.abs(y)) > 1e12 * scale):
            raise SdpError(
                "iterates diverge; problem appears infeasible or unbounded "
                f"(|y| = {np.max(np.abs(y)) if nv else 0:.3e}, "
                f"tr X = {max(np.trace(xi).real for xi in x):.3e})")

        sinv = [np.linalg.solve(s[p], np.eye(sizes[p]))
                for p in range(len(sizes))]
        sinv = [(m + m.T) / 2 for m in sinv]
        schur = np.zeros((nv, nv))
        for k in range(nv):
            tks = [x[p] @ amats[k][p] @ sinv[p] for p in range(len(sizes))]
            for l in range(nv):
                schur[l, k] = sum(np.sum(amats[l][p] * tks[p].T)
                                  for p in range(len(sizes)))
        schur = (schur + schur.T) / 2

        def solve_newton(sigma_mu, cross):
            h = []
            for p in range(len(sizes)):
                hp = -x[p] - x[p] @ rd[p] @ sinv[p]
                if sigma_mu:
                    hp = hp + sigma_mu * sinv[p]
                if cross is not None:
                    hp = hp - cross[p] @ sinv[p]
                h.append(hp)
            if nv:
                rhs = rp - a_apply(h)
                try:
                    dy = np.linalg.solve(
                        schur + 1e-14 * scale * np.eye(nv), rhs)
                except np.linalg.LinAlgError:
                    raise SdpError("Schur complement is singular; the "
                                   "constraints are linearly dependent")
            else:
                dy = np.zeros(0)
            ady = a_adjoint(dy)
            ds = [rd[p] - ady[p] for p in range(len(sizes))]
            dx = [h[p] + x[p] @ ady[p] @ sinv[p] for p in range(len(sizes))]
            dx = [(d + d.T) / 2 for d in dx]
            return dy, dx, ds

        dy_a, dx_a, ds_a = solve_newton(0.0, None)
        ap = min([_max_step(x[p], dx_a[p]) for p in range(len(sizes))] + [1e30])
        ad = min([_max_step(s[p], ds_a[p]) for p in range(len(sizes))] + [1e30])
        ap, ad = min(1.0, 0.99 * ap), min(1.0, 0.99 * ad)
        mu_aff = sum(np.sum((x[p] + ap * dx_a[p]) * (s[p] + ad * ds_a[p]))
                     for p in range(len(sizes))) / ntot
        sigma = min(1.0, max((mu_aff / mu) ** 3 if mu > 0 else 0.0, 1e-10))

        cross = [dx_a[p] @ ds_a[p] for p in range(len(sizes))]
        dy, dx, ds = solve_newton(sigma * mu, cross)
        ap = min([_max_step(x[p], dx[p]) for p in range(len(sizes))] + [1e30])
        ad = min([_max_step(s[p], ds[p]) for p in range(len(sizes))] + [1e30])
        tau = 0.98 if mu > 1e-6 * scale else 0.995
        ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
        if ap < 1e-10 and ad < 1e-10:
            raise SdpError(f"interior-point stalled at iteration {it} "
                           f"(mu = {mu:.3e})")
        x = [x[p] + ap * dx[p] for p in range(len(sizes))]
        s = [s[p] + ad * ds[p] for p in range(len(sizes))]
        y = y + ad * dy
    else:
        raise SdpError(
            f"interior-point did not converge in {max_iterations} "
            f"iterations (relgap {relgap:.2e}, pinf {pinf:.2e}, "
            f"dinf {dinf:.2e})")

    ytilde = [0.0] * problem.nvars
    for j, l in enumerate(keep):
        ytilde[l] = -y[j]
    b0 = _real_scalar(problem.b0)
    moment = b0 + sum(_real_scalar(problem.b[l]) * ytilde[l]
                      for l in range(problem.nvars))
    sos = b0 + sum(np.sum(cmats[p] * x[p]) for p in range(len(sizes)))
    xblocks, zblocks = [], []
    pos_of = {i: pos for pos, i in enumerate(live)}
    for i in range(problem.nblocks):
        m = problem.block_sizes[i]
        zi = _embed(problem.A[0][i]) + sum(
            ytilde[l] * _embed(problem.A[l + 1][i])
            for l in range(problem.nvars))
        zblocks.append((zi + zi.conj().T) / 2)
        if i in pos_of:
            p = pos_of[i]
            xi = _derealify(x[p], m) if complex_block[p] \
                else x[p].astype(complex)
            xblocks.append((xi + xi.conj().T) / 2)
        else:
            xblocks.append(np.zeros((m, m), dtype=complex))
    xsp = tuple(tuple(np.linalg.eigvalsh(bl)) for bl in xblocks)
    zsp = tuple(tuple(np.linalg.eigvalsh(bl)) for bl in zblocks)
    return SdpSolution(problem, ytilde, xblocks, zblocks, float(moment),
                       float(sos), abs(float(moment) - float(sos)),
                       False, it, xsp, zsp)


def solve(problem: BlockSdpProblem, tol: float = 1e-9,
          max_iterations: int = 100) -> SdpSolution:
    if not 0 < tol <= 1e-4:
        raise SdpError("tolerance must lie in (0, 1e-4]")
    if problem.exact and all(problem.block_sizes[i] == 1
                             for i in problem.live_blocks):
        return _exact_lp(problem)
    return _ipm(problem, tol, max_iterations)


def complementarity_ranks(sol: SdpSolution, tol_rank: float = 1e-7) -> list:
    """Per-block (rank Z, rank X) by eigenvalue threshold; the threshold is
    tol_rank times the largest eigenvalue across the solution pair."""
    problem = sol.problem
    if sol.gap > 1e-5 * (1 + abs(_as_float(sol.moment_value))):
        warnings.warn("duality gap is large; complementarity ranks may be "
                      "unreliable", stacklevel=2)
    out = []
    if sol.exact:
        for i in range(problem.nblocks):
            rz = 0 if sol.zblocks[i][0][0].is_zero() else 1
            rx = 0 if sol.xblocks[i][0][0].is_zero() else 1
            out.append((rz, rx))
    else:
        lam_max = max([abs(v) for sp in sol.xspectra + sol.zspectra
                       for v in sp] + [1e-12])
        thr = tol_rank * lam_max
        for i in range(problem.nblocks):
            rz = sum(1 for v in sol.zspectra[i] if v > thr)
            rx = sum(1 for v in sol.xspectra[i] if v > thr)
            out.append((rz, rx))
    for i, (rz, rx) in enumerate(out):
        if rz + rx > problem.block_sizes[i]:
            raise SdpError(
                f"block {i}: rank Z + rank X = {rz}+{rx} exceeds the block "
                f"size {problem.block_sizes[i]}; complementarity fails")
    return out


def _as_float(v) -> float:
    return to_real_float(v) if _exact_scalar(v) else float(v)


# -- SDPA sparse format ------------------------------------------------------

def export_sdpa(problem: BlockSdpProblem, path) -> None:
    """Sparse SDPA file for the moment side: min (-b).x subject to
    X = sum_l x_l A_l - (-A_0) >= 0.  Complex blocks are written in their
    realified form.  The affine offset b0 travels in a comment."""
    import numpy as np
    lines = ["* produced by bellsos",
             f"*offset {_as_float(problem.b0)!r}",
             f"*direction {problem.direction}"]
    if problem.frozen:
        lines.append(f"*frozen {' '.join(map(str, sorted(problem.frozen)))}")
    data = [[_embed(problem.A[l][i]) for i in range(problem.nblocks)]
            for l in range(problem.nvars + 1)]
    complex_block = [any(np.max(np.abs(data[l][i].imag)) > 0
                         for l in range(problem.nvars + 1))
                     for i in range(problem.nblocks)]
    sizes = [2 * n if cb else n
             for n, cb in zip(problem.block_sizes, complex_block)]
    lines.append(str(problem.nvars))
    lines.append(str(problem.nblocks))
    lines.append(" ".join(map(str, sizes)))
    lines.append(" ".join(repr(-_as_float(v)) for v in problem.b))
    for l in range(problem.nvars + 1):
        for i in range(problem.nblocks):
            a = data[l][i]
            if complex_block[i]:
                a = 2 * _realify(a)
            else:
                a = np.real(a)
            if l == 0:
                a = -a
            for r in range(a.shape[0]):
                for c in range(r, a.shape[1]):
                    if a[r, c] != 0:
                        lines.append(f"{l} {i + 1} {r + 1} {c + 1} "
                                     f"{float(a[r, c])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sdpa(path) -> BlockSdpProblem:
    """Parse a sparse SDPA file back into a (numeric) BlockSdpProblem."""
    import numpy as np
    b0, direction, frozen = 0.0, "moment-max", frozenset()
    tokens = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line[0] in "*\"":
                if line.startswith("*offset"):
                    b0 = float(line.split()[1])
                elif line.startswith("*direction"):
                    direction = line.split()[1]
                elif line.startswith("*frozen"):
                    frozen = frozenset(map(int, line.split()[1:]))
                continue
            for junk in ",(){}":
                line = line.replace(junk, " ")
            tokens.extend(line.split())
    nvars = int(tokens[0])
    nblocks = int(tokens[1])
    pos = 2
    sizes = [abs(int(t)) for t in tokens[pos:pos + nblocks]]
    pos += nblocks
    cvec = [float(t) for t in tokens[pos:pos + nvars]]
    pos += nvars
    mats = [[np.zeros((n, n)) for n in sizes] for _ in range(nvars + 1)]
    entries = tokens[pos:]
    if len(entries) % 5:
        raise SdpError("malformed SDPA entry section")
    for e in range(0, len(entries), 5):
        l, blk, r, c = (int(t) for t in entries[e:e + 4])
        v = float(entries[e + 4])
        mats[l][blk - 1][r - 1, c - 1] = v
        mats[l][blk - 1][c - 1, r - 1] = v
    a = [[-m for m in mats[0]]] + mats[1:]
    return BlockSdpProblem(tuple(sizes), a, b0, [-v for v in cvec],
                           direction, frozen)
