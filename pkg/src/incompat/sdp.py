"""Primal-dual interior-point solver for small block-diagonal SDPs.

Problem form (maximization):

    max  sum_b tr(C_b X_b) + c^T y
    s.t. sum_b tr(A_ib X_b) + d_i^T y = r_i    i = 1..p
         X_b >= 0 (psd),  y free

with dual

    min  r^T z
    s.t. S_b = sum_i z_i A_ib - C_b >= 0,   D^T z = c.

The search direction is the HKM one: linearized complementarity
X dS + dX S = mu_hat I - X S - K, solved through the Schur complement
M_ij = sum_b tr(A_ib X_b A_jb S_b^-1), which is symmetric positive definite
when the constraints are independent.  Free variables are eliminated by a
small second Schur step.  Steps use a 0.98 fraction-to-boundary rule, with
Mehrotra's predictor-corrector on by default (set corrector=False for the
plain short-step path following).

Everything is dense numpy and fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _config
from .errors import CapExceeded, SolverError, ValidationError


@dataclass
class _Constraint:
    rhs: float
    blocks: dict[int, np.ndarray]
    free: np.ndarray | None


class SdpProblem:
    def __init__(self, block_sizes, n_free: int = 0):
        self.block_sizes = list(int(s) for s in block_sizes)
        if any(s < 1 for s in self.block_sizes):
            raise ValidationError("block sizes must be positive")
        self.n_free = int(n_free)
        self.objective: dict[int, np.ndarray] = {}
        self.free_objective = np.zeros(self.n_free)
        self.constraints: list[_Constraint] = []

    def set_objective_block(self, b: int, mat) -> None:
        self.objective[b] = self._check_block(b, mat)

    def set_free_objective(self, vec) -> None:
        v = np.asarray(vec, dtype=float)
        if v.shape != (self.n_free,):
            raise ValidationError("free objective has wrong length")
        self.free_objective = v

    def add_constraint(self, rhs: float, blocks: dict[int, np.ndarray],
                       free=None) -> None:
        checked = {b: self._check_block(b, m) for b, m in blocks.items()}
        fv = None
        if free is not None:
            fv = np.asarray(free, dtype=float)
            if fv.shape != (self.n_free,):
                raise ValidationError("free coefficient vector has wrong length")
        self.constraints.append(_Constraint(float(rhs), checked, fv))

    def _check_block(self, b: int, mat) -> np.ndarray:
        if not 0 <= b < len(self.block_sizes):
            raise ValidationError(f"no block {b}")
        m = np.asarray(mat, dtype=float)
        s = self.block_sizes[b]
        if m.shape != (s, s):
            raise ValidationError(f"block {b} expects {s}x{s}, got {m.shape}")
        if np.abs(m - m.T).max() > 1e-12 * (1 + np.abs(m).max()):
            raise ValidationError("constraint/objective blocks must be symmetric")
        return (m + m.T) / 2

    @property
    def p(self) -> int:
        return len(self.constraints)


@dataclass
class SdpSolution:
    status: str  # "optimal" | "max-iter" | "infeasible-detected"
    primal_value: float
    dual_value: float
    gap: float
    rel_gap: float
    blocks: list[np.ndarray]
    free_values: np.ndarray
    dual_z: np.ndarray
    dual_slacks: list[np.ndarray]
    iterations: int
    primal_residual: float
    dual_residual: float
    history: list[dict] = field(default_factory=list, repr=False)


def _min_eig_scaled(base_chol: np.ndarray, delta: np.ndarray) -> float:
    # smallest eigenvalue of L^-1 delta L^-T, for the step-length rule
    a = np.linalg.solve(base_chol, delta)
    b = np.linalg.solve(base_chol, a.T).T
    return float(np.linalg.eigvalsh((b + b.T) / 2)[0])


def _step_length(chols, deltas) -> float:
    alpha = 1e8
    for l, d in zip(chols, deltas):
        lam = _min_eig_scaled(l, d)
        if lam < -1e-14:
            alpha = min(alpha, -1.0 / lam)
    return alpha


def solve(prob: SdpProblem, gap_tol: float = 1e-7, feas_tol: float = 1e-8,
          max_iter: int = 100, corrector: bool = True, start=None,
          dim_cap: int | None = None) -> SdpSolution:
    """Run the interior-point iteration; never raises on non-convergence,
    the status field says what happened."""
    if dim_cap is None:
        dim_cap = _config.get("max_sdp_dim")
    if sum(s * s for s in prob.block_sizes) > dim_cap:
        raise CapExceeded(f"sum of squared block sizes exceeds cap {dim_cap}")
    if prob.p == 0:
        raise ValidationError("problem needs at least one constraint")

    nb = len(prob.block_sizes)
    p = prob.p
    q = prob.n_free
    sizes = prob.block_sizes
    bign = sum(sizes)

    cmats = [prob.objective.get(b, np.zeros((s, s))) for b, s in enumerate(sizes)]
    cvec = prob.free_objective
    r = np.array([con.rhs for con in prob.constraints])
    dmat = np.zeros((p, q))
    for i, con in enumerate(prob.constraints):
        if con.free is not None:
            dmat[i] = con.free

    # per-block constraint stacks; constraints not touching a block are zero
    # rows there, so keep an index list per block instead
    touch = [[] for _ in range(nb)]
    for i, con in enumerate(prob.constraints):
        for b in con.blocks:
            touch[b].append(i)
    stacks = []
    for b in range(nb):
        if touch[b]:
            stacks.append(np.stack([prob.constraints[i].blocks[b] for i in touch[b]]))
        else:
            stacks.append(np.zeros((0, sizes[b], sizes[b])))

    def opA(xs):
        out = np.zeros(p)
        for b in range(nb):
            if touch[b]:
                np.add.at(out, touch[b], np.einsum("ijk,jk->i", stacks[b], xs[b]))
        return out

    def opAt(z):
        return [np.einsum("i,ijk->jk", z[touch[b]], stacks[b])
                if touch[b] else np.zeros((sizes[b], sizes[b])) for b in range(nb)]

    scale_p = 1.0 + float(np.abs(r).max(initial=0.0))
    scale_d = 1.0 + max([float(np.abs(c).max(initial=0.0)) for c in cmats]
                        + [float(np.abs(cvec).max(initial=0.0))])

    if start is not None:
        xs = [np.array(m, dtype=float) for m in start[0]]
        y = np.array(start[1], dtype=float).reshape(q)
        z = np.array(start[2], dtype=float).reshape(p)
        ss = [np.array(m, dtype=float) for m in start[3]]
    else:
        xs = [scale_p * np.eye(s) for s in sizes]
        ss = [scale_d * np.eye(s) for s in sizes]
        y = np.zeros(q)
        z = np.zeros(p)

    history: list[dict] = []
    status = "max-iter"
    it = 0
    alpha_p = alpha_d = 0.0
    best = None  # (merit, xs, y, z, ss) of the most converged iterate


    def residuals():
        r_p = r - opA(xs) - dmat @ y
        atz = opAt(z)
        r_d = [atz[b] - cmats[b] - ss[b] for b in range(nb)]
        r_c = cvec - dmat.T @ z
        return r_p, r_d, r_c

    for it in range(1, max_iter + 1):
        r_p, r_d, r_c = residuals()
        gap_xs = sum(float(np.tensordot(xs[b], ss[b])) for b in range(nb))
        mu = gap_xs / bign
        pobj = sum(float(np.tensordot(cmats[b], xs[b])) for b in range(nb)) \
            + float(cvec @ y)
        dobj = float(r @ z)
        pinf = float(np.abs(r_p).max(initial=0.0)) / scale_p
        dinf = max([float(np.abs(m).max(initial=0.0)) for m in r_d]
                   + [float(np.abs(r_c).max(initial=0.0))]) / scale_d
        rel_gap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
        history.append({"pobj": pobj, "dobj": dobj, "mu": mu, "pinf": pinf,
                        "dinf": dinf, "gap_xs": gap_xs,
                        "alpha_p": alpha_p, "alpha_d": alpha_d})
        merit = max(pinf, dinf, rel_gap)
        if best is None or merit < best[0]:
            best = (merit, [x.copy() for x in xs], y.copy(), z.copy(),
                    [s.copy() for s in ss])
        if pinf <= feas_tol and dinf <= feas_tol and rel_gap <= gap_tol:
            status = "optimal"
            break
        if dinf <= 1e-6 and dobj < -1e10 * scale_p:
            status = "infeasible-detected"
            break
        if float(np.abs(z).max(initial=0.0)) > 1e14:
            status = "infeasible-detected"
            break

        try:
            lx = [np.linalg.cholesky(x) for x in xs]
            ls = [np.linalg.cholesky(s) for s in ss]
            sinv = []
            for b in range(nb):
                ident = np.eye(sizes[b])
                half = np.linalg.solve(ls[b], ident)
                sinv.append(half.T @ half)

            m_schur = np.zeros((p, p))
            for b in range(nb):
                if not touch[b]:
                    continue
                t = np.einsum("jk,ikl,lm->ijm", xs[b], stacks[b], sinv[b],
                              optimize=True)
                contrib = np.einsum("ijm,kmj->ik", t, stacks[b], optimize=True)
                idx = np.asarray(touch[b])
                m_schur[np.ix_(idx, idx)] += contrib
            m_schur = (m_schur + m_schur.T) / 2

            def newton(mu_hat, corr):
                # rhs h_i = A(mu_hat S^-1 - X - corr S^-1 - X R_d S^-1) - r_p
                inner = []
                for b in range(nb):
                    w = mu_hat * sinv[b] - xs[b] - xs[b] @ r_d[b] @ sinv[b]
                    if corr is not None:
                        w = w - corr[b] @ sinv[b]
                    inner.append(w)
                h = opA(inner) - r_p
                if q:
                    sol = np.linalg.solve(m_schur, np.column_stack([h, dmat]))
                    wg, wd = sol[:, 0], sol[:, 1:]
                    dy = np.linalg.solve(dmat.T @ wd, r_c - dmat.T @ wg)
                    dz = wg + wd @ dy
                else:
                    dy = np.zeros(0)
                    dz = np.linalg.solve(m_schur, h)
                atdz = opAt(dz)
                dss = [atdz[b] + r_d[b] for b in range(nb)]
                dxs = []
                for b in range(nb):
                    w = mu_hat * sinv[b] - xs[b] - xs[b] @ dss[b] @ sinv[b]
                    if corr is not None:
                        w = w - corr[b] @ sinv[b]
                    dxs.append((w + w.T) / 2)
                return dxs, dy, dz, dss

            if corrector:
                dxs_a, dy_a, dz_a, dss_a = newton(0.0, None)
                ap = min(1.0, 0.98 * _step_length(lx, dxs_a))
                ad = min(1.0, 0.98 * _step_length(ls, dss_a))
                mu_aff = sum(
                    float(np.tensordot(xs[b] + ap * dxs_a[b], ss[b] + ad * dss_a[b]))
                    for b in range(nb)) / bign
                sigma = min(0.999, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))
                corr = [dxs_a[b] @ dss_a[b] for b in range(nb)]
                dxs, dy, dz, dss = newton(sigma * mu, corr)
            else:
                dxs, dy, dz, dss = newton(0.3 * mu, None)

            alpha_p = min(1.0, 0.98 * _step_length(lx, dxs))
            alpha_d = min(1.0, 0.98 * _step_length(ls, dss))
        except np.linalg.LinAlgError:
            status = "max-iter"
            break

        for b in range(nb):
            xs[b] = xs[b] + alpha_p * dxs[b]
            xs[b] = (xs[b] + xs[b].T) / 2
            ss[b] = ss[b] + alpha_d * dss[b]
            ss[b] = (ss[b] + ss[b].T) / 2
        y = y + alpha_p * dy
        z = z + alpha_d * dz

        if alpha_p < 1e-4 and alpha_d < 1e-4 and it > 5:
            recent = [h["alpha_p"] + h["alpha_d"] for h in history[-4:]]
            if all(a < 2e-4 for a in recent):
                status = "max-iter"
                break

    def final_stats():
        r_p, r_d, r_c = residuals()
        pobj = sum(float(np.tensordot(cmats[b], xs[b])) for b in range(nb)) \
            + float(cvec @ y)
        dobj = float(r @ z)
        pinf = float(np.abs(r_p).max(initial=0.0)) / scale_p
        dinf = max([float(np.abs(m).max(initial=0.0)) for m in r_d]
                   + [float(np.abs(r_c).max(initial=0.0))]) / scale_d
        rel_gap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
        return pobj, dobj, pinf, dinf, rel_gap

    pobj, dobj, pinf, dinf, rel_gap = final_stats()
    if best is not None and best[0] < max(pinf, dinf, rel_gap):
        _, xs, y, z, ss = best
        pobj, dobj, pinf, dinf, rel_gap = final_stats()
    if status != "optimal" and pinf <= feas_tol and dinf <= feas_tol \
            and rel_gap <= gap_tol:
        status = "optimal"
    return SdpSolution(
        status=status, primal_value=pobj, dual_value=dobj, gap=dobj - pobj,
        rel_gap=rel_gap, blocks=xs, free_values=y, dual_z=z, dual_slacks=ss,
        iterations=it, primal_residual=pinf, dual_residual=dinf,
        history=history,
    )


# ---------------------------------------------------------------------------
# complex Hermitian blocks via the real embedding


_EMBED_TOL = 1e-10


def embed_hermitian(h: np.ndarray) -> np.ndarray:
    """Real-symmetric image [[Re, -Im], [Im, Re]] of a Hermitian matrix.

    Traces double under the embedding: tr(emb(F) emb(E)) = 2 tr(F E).
    """
    h = np.asarray(h, dtype=complex)
    if np.abs(h - h.conj().T).max(initial=0.0) > _EMBED_TOL * (1 + np.abs(h).max()):
        raise ValidationError("matrix is not Hermitian")
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def extract_hermitian(x: np.ndarray) -> np.ndarray:
    """Undo embed_hermitian, averaging away any unstructured part.

    The average (X + J X J^T)/2 with J = [[0, -I], [I, 0]] is a congruence
    combination, so positive semidefiniteness survives.
    """
    x = np.asarray(x, dtype=float)
    d2 = x.shape[0]
    if d2 % 2:
        raise ValidationError("embedded matrix must have even dimension")
    d = d2 // 2
    jmat = np.block([[np.zeros((d, d)), -np.eye(d)], [np.eye(d), np.zeros((d, d))]])
    avg = (x + jmat @ x @ jmat.T) / 2
    h = avg[:d, :d] + 1j * avg[d:, :d]
    return (h + h.conj().T) / 2
