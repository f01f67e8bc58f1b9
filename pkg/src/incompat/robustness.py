"""Bounds and exact values for the incompatibility robustness eta(G).

eta(G) is the largest noise parameter for which the observables of an
anti-commutativity graph G, depolarized to (1 +- eta A_v)/2, stay jointly
measurable.  It only depends on G, is 1 exactly for edgeless graphs, and
decreases when vertices are added.  The routines here produce certified
lower/upper bounds from several independent routes (fractional chromatic,
Lovasz theta, cliques, operator signings, skew spectra of root graphs) plus
closed forms for the hand-solvable families, and an SDP that computes eta
exactly on small instances together with a parent POVM witness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product

import numpy as np

from . import _config, graphs, invariants, realization, sdp, spectral
from .errors import (CapExceeded, InternalInconsistency, SolverError,
                     ValidationError)

CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class Bound:
    value: float
    method: str
    kind: str  # "lower" | "upper" | "exact"
    certificate: dict | None = None
    note: str = ""

    def to_json_dict(self) -> dict:
        d = {"value": self.value, "method": self.method, "kind": self.kind}
        if self.certificate is not None:
            d["certificate"] = self.certificate
        if self.note:
            d["note"] = self.note
        return d


# ---------------------------------------------------------------------------
# parent POVM witnesses


@dataclass
class ParentPovm:
    """2^n effects on dimension d; outcome index t assigns a_v = +1 exactly
    when bit v of t is zero."""

    effects: np.ndarray  # (2^n, d, d) complex
    eta: float

    @property
    def n(self) -> int:
        return int(round(math.log2(self.effects.shape[0])))

    @property
    def dimension(self) -> int:
        return self.effects.shape[1]

    def marginal_plus(self, v: int) -> np.ndarray:
        picks = [t for t in range(self.effects.shape[0]) if not (t >> v) & 1]
        return self.effects[picks].sum(axis=0)

    def residuals(self, mats) -> dict:
        d = self.dimension
        eye = np.eye(d)
        comp = float(np.linalg.norm(self.effects.sum(axis=0) - eye, 2))
        marg = 0.0
        for v, a in enumerate(mats):
            target = (eye + self.eta * a) / 2
            marg = max(marg, float(np.linalg.norm(self.marginal_plus(v) - target, 2)))
        mineig = min(float(np.linalg.eigvalsh(e)[0]) for e in self.effects)
        herm = max(float(np.abs(e - e.conj().T).max()) for e in self.effects)
        return {"completeness": comp, "marginal": marg,
                "min_eigenvalue": mineig, "hermiticity": herm}

    def validate(self, mats, completeness_tol: float = 1e-8,
                 marginal_tol: float = 1e-7) -> dict:
        res = self.residuals(mats)
        if res["completeness"] > completeness_tol:
            raise ValidationError(f"completeness residual {res['completeness']:g}")
        if res["marginal"] > marginal_tol:
            raise ValidationError(f"marginal residual {res['marginal']:g}")
        if res["min_eigenvalue"] < -1e-8:
            raise ValidationError(f"effect not psd: {res['min_eigenvalue']:g}")
        return res

    def to_binary(self, path) -> None:
        with open(path, "wb") as fh:
            np.array([self.n, self.dimension], dtype="<i8").tofile(fh)
            np.ascontiguousarray(self.effects.astype("<c16")).tofile(fh)

    @staticmethod
    def from_binary(path, eta: float = float("nan")) -> "ParentPovm":
        with open(path, "rb") as fh:
            header = np.fromfile(fh, dtype="<i8", count=2)
            n, d = int(header[0]), int(header[1])
            data = np.fromfile(fh, dtype="<c16", count=(1 << n) * d * d)
        return ParentPovm(data.reshape(1 << n, d, d), eta)


def explicit_complete_parent(obs: realization.ObservableSet) -> ParentPovm:
    """The closed-form optimal parent for pairwise anti-commuting observables:
    E(a) = 2^-n (1 + n^-1/2 sum_v a_v A_v)."""
    mats = obs.matrices()
    n = obs.n
    d = obs.dimension
    eta = 1.0 / math.sqrt(n)
    effects = np.zeros((1 << n, d, d), dtype=complex)
    for t in range(1 << n):
        acc = np.eye(d, dtype=complex)
        for v in range(n):
            sign = 1.0 if not (t >> v) & 1 else -1.0
            acc += sign * eta * mats[v]
        effects[t] = acc / (1 << n)
    return ParentPovm(effects, eta)


# ---------------------------------------------------------------------------
# individual bounds


def eta_upper_lovasz(g: graphs.Graph, theta_cap: int = 80) -> Bound:
    """eta <= sqrt(theta/n), with the solver's dual gap folded in."""
    if g.n == 0:
        raise ValidationError("empty graph")
    th = invariants.lovasz_theta(g, cap=theta_cap)
    val = math.sqrt(max(th.upper, 0.0) / g.n)
    return Bound(val, "lovasz", "upper",
                 {"theta": th.value, "theta_gap": th.gap})


def eta_upper_subgraph(g: graphs.Graph, strategy: str = "clique",
                       clique_cap: int = 40, theta_cap: int = 80) -> Bound:
    """Monotonicity bound: eta(G) <= eta(H) for induced H.

    "clique" uses the maximum clique (eta(K_w) = w^-1/2); "search" is a
    heuristic that additionally applies the theta bound to every subgraph
    obtained by deleting at most two vertices.
    """
    if strategy not in ("clique", "search"):
        raise ValidationError(f"unknown strategy {strategy!r}")
    q = invariants.max_clique(g, cap=clique_cap)
    best = 1.0 / math.sqrt(max(len(q), 1))
    cert: dict = {"clique": list(q)}
    if strategy == "search":
        deletions = [()] + [(v,) for v in range(g.n)]
        deletions += [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
        for dele in deletions:
            keep = [v for v in range(g.n) if v not in dele]
            if not keep:
                continue
            h = graphs.induced_subgraph(g, keep)
            try:
                th = invariants.lovasz_theta(h, cap=theta_cap)
            except (CapExceeded, SolverError):
                continue
            val = math.sqrt(max(th.upper, 0.0) / h.n)
            if val < best:
                best = val
                cert = {"deleted": list(dele), "theta": th.value}
    return Bound(best, f"subgraph-{strategy}", "upper", cert,
                 note="heuristic search" if strategy == "search" else "")


def eta_lower_fractional(g: graphs.Graph, cap: int = 30) -> Bound:
    """eta >= 1/chi_f, exact rational."""
    fc = invariants.fractional_chromatic(g, cap=cap)
    inv = Fraction(fc.value.denominator, fc.value.numerator)
    return Bound(float(inv), "fractional", "lower",
                 {"p": inv.numerator, "q": inv.denominator,
                  "chi_f": f"{fc.value.numerator}/{fc.value.denominator}",
                  "witness_verified": fc.verified})


def _best_signing(mats):
    """Max over sign patterns of ||sum a_v A_v||; global flip symmetry pins
    the first sign, and a gray walk updates the sum in place."""
    n = len(mats)
    h = np.zeros_like(mats[0])
    for m in mats:
        h = h + m
    signs = [1] * n
    norm = float(np.abs(np.linalg.eigvalsh(h)).max())
    best_norm, best_signs = norm, tuple(signs)
    for step in range(1, 1 << (n - 1)):
        flip = (step & -step).bit_length()  # gray walk over bits 1..n-1
        signs[flip] = -signs[flip]
        h = h + 2.0 * signs[flip] * mats[flip]
        norm = float(np.abs(np.linalg.eigvalsh(h)).max())
        if norm > best_norm + 1e-12:
            best_norm, best_signs = norm, tuple(signs)
    return best_norm, best_signs


def eta_upper_signing(obs: realization.ObservableSet, n_cap: int = 24) -> Bound:
    """eta <= max_a ||sum a_v A_v|| / n."""
    if obs.n == 0:
        raise ValidationError("no observables")
    if obs.n > n_cap:
        raise CapExceeded(f"signing enumeration capped at {n_cap} observables")
    if obs.n == 1:
        return Bound(1.0, "signing", "upper", {"signs": [1]})
    norm, signs = _best_signing(obs.matrices())
    return Bound(norm / obs.n, "signing", "upper", {"signs": list(signs)})


def _root_edge_transitive(root: graphs.Graph) -> bool | None:
    if root.meta and root.meta.edge_transitive is not None:
        return root.meta.edge_transitive
    try:
        return graphs.check_transitivity(root).edge_transitive
    except CapExceeded:
        return None


def eta_line_skew(root: graphs.Graph, class_cap: int | None = None) -> Bound:
    """eta(L(root)) <= max skew energy of root / (2m); equality for
    edge-transitive roots."""
    live = [v for v in range(root.n) if root.degree(v) > 0]
    if not live:
        raise ValidationError("root has no edges")
    core = graphs.induced_subgraph(root, live)
    comps = graphs.connected_components(core)
    worst, cert = None, None
    for comp in comps:
        sub = graphs.induced_subgraph(core, comp)
        energy, witness = spectral.max_skew_energy(sub, cap=class_cap)
        val = energy / (2 * sub.m)
        if worst is None or val < worst:
            worst = val
            cert = {"skew_energy": energy, "root_m": sub.m,
                    "witness": spectral.orientation_to_json_dict(witness)}
    et = _root_edge_transitive(root)
    kind = "exact" if (et and len(comps) == 1) else "upper"
    note = "" if et is not None else "edge-transitivity undecided"
    return Bound(worst, "line-skew", kind, cert, note)


def eta_lower_bipartite_energy(root: graphs.Graph) -> Bound:
    """eta(L(root)) >= energy(root)/(2m) for bipartite edge-transitive roots."""
    if root.m == 0:
        raise ValidationError("root has no edges")
    if graphs.is_bipartite(root) is None:
        raise ValidationError("root is not bipartite")
    et = _root_edge_transitive(root)
    if et is not True:
        raise ValidationError("edge-transitivity of the root is required")
    val = spectral.graph_energy(root) / (2 * root.m)
    return Bound(val, "bipartite-energy", "lower",
                 {"energy": spectral.graph_energy(root), "root_m": root.m})


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedForm:
    family: str
    params: dict
    exact: bool
    value: float | None = None
    lower: float | None = None
    upper: float | None = None
    condition: str | None = None
    condition_holds: bool | None = None
    note: str = ""

    def bounds(self) -> list[Bound]:
        out = []
        tag = f"closed-form-{self.family}"
        if self.exact:
            out.append(Bound(self.value, tag, "exact", dict(self.params)))
        else:
            if self.lower is not None:
                out.append(Bound(self.lower, tag, "lower", dict(self.params)))
            if self.upper is not None:
                cert = dict(self.params)
                if self.condition:
                    cert["condition"] = self.condition
                    cert["condition_holds"] = self.condition_holds
                out.append(Bound(self.upper, tag, "upper", cert))
        return out


def eta_cycle(n: int) -> float:
    if n % 2:
        return math.cos(math.pi / (2 * n)) / (n * math.sin(math.pi / (2 * n)))
    return 2.0 / (n * math.sin(math.pi / n))


def path_interval(n: int) -> tuple[float, float]:
    """Certified [lower, upper] for eta(P_n)."""
    if n == 1:
        return 1.0, 1.0
    if n % 2 == 0:
        lo = eta_cycle(n + 2)
        up = math.cos(math.pi / (2 * (n + 2))) / (n * math.sin(math.pi / (2 * (n + 2)))) - 1.0 / n
    else:
        lo = eta_cycle(n + 1)
        up = 1.0 / (n * math.sin(math.pi / (2 * (n + 2)))) - 1.0 / n
    return lo, up


_SKEW_CONFERENCE_CACHE: dict[int, bool] = {}


def _skew_conference_exists(n: int) -> bool | None:
    """Exhaustive search over sign patterns of the upper triangle."""
    if n == 1:
        return False
    if n in _SKEW_CONFERENCE_CACHE:
        return _SKEW_CONFERENCE_CACHE[n]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) > 16:
        return None
    found = False
    target = (n - 1) * np.eye(n, dtype=np.int64)
    for bits in range(1 << len(pairs)):
        s = np.zeros((n, n), dtype=np.int64)
        for t, (i, j) in enumerate(pairs):
            v = 1 if not (bits >> t) & 1 else -1
            s[i, j] = v
            s[j, i] = -v
        if np.array_equal(s @ s.T, target):
            found = True
            break
    _SKEW_CONFERENCE_CACHE[n] = found
    return found


def _partial_hadamard_exists(r: int, s: int) -> bool | None:
    """Does an r x s +-1 matrix with orthogonal rows exist?"""
    if r == 1:
        return True
    if r > s:
        return False
    if s % 2:
        return False  # two +-1 rows of odd length cannot be orthogonal
    if r == 2:
        return True
    if (r - 1) * s > 20:
        return None
    # first row normalized to all ones by column sign flips
    for bits in product((1, -1), repeat=(r - 1) * s):
        m = np.ones((r, s), dtype=np.int64)
        m[1:] = np.array(bits).reshape(r - 1, s)
        if np.array_equal(m @ m.T, s * np.eye(r, dtype=np.int64)):
            return True
    return False


def closed_form(family: str, **params) -> ClosedForm:
    """Known values and conditional bounds for the hand-solvable families."""
    if family == "complete":
        n = int(params["n"])
        if n < 1:
            raise ValidationError("n >= 1")
        return ClosedForm(family, {"n": n}, True, value=1.0 / math.sqrt(n))

    if family == "cycle":
        n = int(params["n"])
        if n < 3:
            raise ValidationError("n >= 3")
        return ClosedForm(family, {"n": n}, True, value=eta_cycle(n))

    if family == "path":
        n = int(params["n"])
        if n < 1:
            raise ValidationError("n >= 1")
        lo, up = path_interval(n)
        if up - lo < 1e-12:
            return ClosedForm(family, {"n": n}, True, value=(lo + up) / 2)
        return ClosedForm(family, {"n": n}, False, lower=lo, upper=up,
                          note="exact value open")

    if family == "johnson":
        n = int(params["n"])
        k = int(params.get("k", 2))
        if k != 2:
            raise ValidationError("closed form covers johnson k=2 only")
        if n < 2:
            raise ValidationError("n >= 2")
        if n == 2:
            return ClosedForm(family, {"n": n, "k": 2}, True, value=1.0)
        up = 1.0 / math.sqrt(n - 1)
        holds = _skew_conference_exists(n)
        if holds:
            return ClosedForm(family, {"n": n, "k": 2}, True, value=up,
                              condition="skew-conference matrix of order n",
                              condition_holds=True)
        return ClosedForm(family, {"n": n, "k": 2}, False, upper=up,
                          condition="skew-conference matrix of order n",
                          condition_holds=holds)

    if family == "hypercube-line":
        d = int(params["d"])
        if d < 1:
            raise ValidationError("d >= 1")
        value = 1.0 if d == 1 else 1.0 / math.sqrt(d)
        return ClosedForm(family, {"d": d}, True, value=value)

    if family == "rook":
        r = int(params["r"])
        s = int(params["s"])
        if r < 1 or s < 1:
            raise ValidationError("r, s >= 1")
        r, s = min(r, s), max(r, s)
        if s == 1:
            return ClosedForm(family, {"r": r, "s": s}, True, value=1.0)
        up = 1.0 / math.sqrt(s)
        holds = _partial_hadamard_exists(r, s)
        if holds:
            return ClosedForm(family, {"r": r, "s": s}, True, value=up,
                              condition="r x s partial Hadamard matrix",
                              condition_holds=True)
        return ClosedForm(family, {"r": r, "s": s}, False, upper=up,
                          condition="r x s partial Hadamard matrix",
                          condition_holds=holds)

    raise ValidationError(f"no closed form for family {family!r}")


# ---------------------------------------------------------------------------
# exact eta by semidefinite programming


def _hermitian_basis(d: int):
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1.0
        yield e
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = 1.0
            e[l, k] = 1.0
            yield e
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = 1.0j
            e[l, k] = -1.0j
            yield e


def _walsh(effects: np.ndarray, n: int) -> np.ndarray:
    """Transform along outcome bits with characters prod_{v in S} a_v(t),
    a_v(t) = +1 when bit v of t is 0.  Self-inverse up to a factor 2^n."""
    out = effects.copy()
    for v in range(n):
        step = 1 << v
        for t in range(1 << n):
            if t & step:
                continue
            lo, hi = out[t].copy(), out[t | step]
            out[t] = lo + hi
            out[t | step] = lo - hi
    return out


def _polish_parent(effects: np.ndarray, mats, eta: float) -> np.ndarray:
    """Minimal-perturbation projection onto exact completeness/marginals.

    Those constraints pin exactly the empty and singleton Walsh components
    of the outcome array: hat E_empty = 1, hat E_{v} = eta A_v.  Higher
    components carry the solver's joint correlations and stay untouched.
    """
    n = len(mats)
    d = effects.shape[1]
    hat = _walsh(effects, n)
    hat[0] = np.eye(d, dtype=complex)
    for v in range(n):
        hat[1 << v] = eta * mats[v]
    return _walsh(hat, n) / (1 << n)


@dataclass
class EtaSdpResult:
    value: float
    gap: float
    povm: ParentPovm
    iterations: int


def eta_exact_sdp(obs: realization.ObservableSet, gap_tol: float = 1e-9,
                  n_cap: int = 6, dim_cap: int = 16) -> EtaSdpResult:
    """Maximize eta subject to a parent POVM existing for the noisy set.

    One psd block per outcome (complex effects through the real embedding),
    eta as a free scalar, and marginal/completeness constraints expanded in
    a Hermitian operator basis.  Repeated observables (twins realize to the
    same monomial up to sign) are collapsed first and the witness spread
    back over the full outcome set; this leaves eta unchanged and keeps the
    optimal face of the program nondegenerate.
    """
    n = obs.n
    d = obs.dimension
    if n == 0:
        raise ValidationError("no observables")
    if n > n_cap:
        raise CapExceeded(f"sdp capped at {n_cap} observables")
    if d > dim_cap:
        raise CapExceeded(f"sdp capped at dimension {dim_cap}")

    seen: dict[tuple, tuple[int, int]] = {}
    reps, flips, distinct = [], [], []
    for mon in obs.monomials:
        if mon.indices in seen:
            j, phase = seen[mon.indices]
            reps.append(j)
            flips.append(0 if mon.phase_exponent == phase else 1)
        else:
            seen[mon.indices] = (len(distinct), mon.phase_exponent)
            reps.append(len(distinct))
            flips.append(0)
            distinct.append(mon)
    if len(distinct) < n:
        core = realization.ObservableSet(tuple(distinct), obs.mode_count)
        inner = eta_exact_sdp(core, gap_tol, n_cap, dim_cap)
        effects = np.zeros(((1 << n), d, d), dtype=complex)
        for b in range(1 << len(distinct)):
            t = 0
            for v in range(n):
                t |= (((b >> reps[v]) & 1) ^ flips[v]) << v
            effects[t] = inner.povm.effects[b]
        povm = ParentPovm(effects, inner.value)
        povm.validate(obs.matrices())
        return EtaSdpResult(inner.value, inner.gap, povm, inner.iterations)

    mats = obs.matrices()
    blocks = 1 << n
    prob = sdp.SdpProblem([2 * d] * blocks, n_free=1)
    prob.set_free_objective([1.0])

    basis = list(_hermitian_basis(d))
    embedded = [sdp.embed_hermitian(f) for f in basis]
    all_blocks = list(range(blocks))
    plus_blocks = [[t for t in all_blocks if not (t >> v) & 1] for v in range(n)]

    for f, ef in zip(basis, embedded):
        rhs = 2.0 * float(np.trace(f).real)
        prob.add_constraint(rhs, {t: ef for t in all_blocks}, free=[0.0])
    for v in range(n):
        av = mats[v]
        for f, ef in zip(basis, embedded):
            coeff = float(np.trace(f @ av).real)
            rhs = float(np.trace(f).real)
            prob.add_constraint(rhs, {t: ef for t in plus_blocks[v]},
                                free=[-coeff])

    # fully feasible warm start: uniform parent, dual slack 1 - emb(A_0)/d
    x0 = [np.eye(2 * d) / blocks for _ in range(blocks)]
    z0 = np.zeros(prob.p)
    z0[:d] = 1.0  # completeness rows for the diagonal basis elements
    a0 = mats[0]
    row = d * d  # first marginal constraint row (v = 0)
    for j, f in enumerate(basis):
        sq = float(np.tensordot(f.conj(), f).real)
        z0[row + j] = -float(np.trace(f.conj().T @ a0).real) / (sq * d)
    s0 = []
    ea0 = sdp.embed_hermitian(a0)
    for t in range(blocks):
        s = np.eye(2 * d)
        if not t & 1:
            s = s - ea0 / d
        s0.append(s)
    sol = sdp.solve(prob, gap_tol=gap_tol,
                    start=(x0, np.zeros(1), z0, s0))
    if sol.status != "optimal":
        raise SolverError(f"eta sdp ended with status {sol.status}",
                          lower=sol.primal_value, upper=sol.dual_value)
    eta = float(sol.free_values[0])
    effects = np.stack([sdp.extract_hermitian(x) for x in sol.blocks])
    effects = _polish_parent(effects, mats, eta)
    povm = ParentPovm(effects, eta)
    povm.validate(mats)
    return EtaSdpResult(eta, float(sol.gap), povm, sol.iterations)


# ---------------------------------------------------------------------------
# norm landscape estimate


@dataclass
class PsiEstimate:
    value: float
    weights: np.ndarray


def psi_estimate(obs: realization.ObservableSet, restarts: int = 32,
                 seed: int = 0, max_rounds: int = 200) -> PsiEstimate:
    """Lower estimate of max_{|b|=1} ||sum b_v A_v||^2 by alternating
    between the top eigenvector and the optimal weights for it."""
    mats = [m.astype(complex) for m in obs.matrices()]
    n = obs.n
    if n == 0:
        raise ValidationError("no observables")
    rng = np.random.default_rng(seed)
    starts = [rng.standard_normal(n) for _ in range(restarts)]
    if n <= 20:
        _, signs = _best_signing(mats)
        starts.append(np.array(signs, dtype=float))

    best_val, best_b = -1.0, None
    for b0 in starts:
        b = b0 / np.linalg.norm(b0)
        last = -1.0
        for _ in range(max_rounds):
            h = sum(bv * m for bv, m in zip(b, mats))
            w, vecs = np.linalg.eigh(h)
            i = int(np.argmax(np.abs(w)))
            lam, psi = w[i], vecs[:, i]
            if abs(lam) - last < 1e-13:
                last = max(last, abs(lam))
                break
            last = abs(lam)
            grad = np.array([float((psi.conj() @ m @ psi).real) for m in mats])
            nrm = np.linalg.norm(grad)
            if nrm < 1e-14:
                break
            b = np.sign(lam) * grad / nrm
        val = last * last
        if val > best_val:
            best_val, best_b = val, b
    return PsiEstimate(float(best_val), best_b)


# ---------------------------------------------------------------------------
# optimality of line-graph families


@dataclass
class OptimalityReport:
    status: str  # "optimal" | "not-optimal" | "inconclusive"
    bound: float  # (n/2m) sqrt(maxdeg)
    achieved: float | None  # max skew energy / 2m, when enumerable
    gap: float | None
    regular: bool
    certificate: list | None  # weighing skew matrix, when found
    reason: str

    def to_json_dict(self) -> dict:
        return {"status": self.status, "bound": self.bound,
                "achieved": self.achieved, "gap": self.gap,
                "regular": self.regular, "certificate": self.certificate,
                "reason": self.reason}


def optimal_incompatibility_check(root: graphs.Graph,
                                  class_cap: int | None = None) -> OptimalityReport:
    """Is eta(L(root)) = (n/2m) sqrt(maxdeg), the best any root of this size
    and degree allows?  Saturation forces a regular root with an orientation
    whose skew matrix is a weighing matrix W(n, deg)."""
    if root.m == 0:
        raise ValidationError("root has no edges")
    if len(graphs.connected_components(root)) != 1:
        raise ValidationError("root must be connected")
    degs = root.degrees()
    delta = max(degs)
    regular = min(degs) == delta
    bound = root.n * math.sqrt(delta) / (2 * root.m)
    try:
        energy, witness = spectral.max_skew_energy(root, cap=class_cap)
    except CapExceeded as exc:
        return OptimalityReport("inconclusive", bound, None, None, regular,
                                None, f"switching enumeration capped: {exc}")
    achieved = energy / (2 * root.m)
    if not regular:
        return OptimalityReport("not-optimal", bound, achieved,
                                bound - achieved, regular, None,
                                "saturation requires a regular root")
    energy_target = root.n * math.sqrt(delta)
    if abs(energy - energy_target) > 1e-9 * (1 + energy_target):
        return OptimalityReport("not-optimal", bound, achieved,
                                bound - achieved, regular, None,
                                "no orientation reaches n sqrt(deg)")
    # integer certificate: the witness skew matrix must be W(n, deg)
    smat = spectral.skew_matrix(witness).astype(np.int64)
    cert = spectral.matrix_certificates(smat)
    if cert.weighing != delta:
        raise InternalInconsistency("saturating orientation fails the exact "
                                    "weighing check")
    et = _root_edge_transitive(root)
    if et is True:
        return OptimalityReport("optimal", bound, achieved, 0.0, regular,
                                smat.tolist(), "weighing orientation found")
    return OptimalityReport("inconclusive", bound, achieved, None, regular,
                            smat.tolist(),
                            "weighing orientation found, but equality needs "
                            "an edge-transitive root")


# ---------------------------------------------------------------------------
# aggregated report


@dataclass
class ReportOptions:
    exact_sdp: bool = False
    sdp_gap: float = 1e-9
    sdp_n_cap: int = 6
    sdp_dim_cap: int = 16
    signing_vertex_cap: int = 16
    signing_dim_cap: int = 512
    theta_cap: int = 80
    clique_cap: int = 40
    frac_cap: int = 30
    class_cap: int | None = None
    subgraph_search: bool = False


def _recognize(h: graphs.Graph):
    """Family tag for closed forms: from metadata, else structurally."""
    if h.meta is not None and h.meta.family != "custom":
        return h.meta.family, dict(h.meta.params)
    n, m = h.n, h.m
    if n >= 1 and m == n * (n - 1) // 2:
        return "complete", {"n": n}
    if n >= 3 and m == n and all(d == 2 for d in h.degrees()) \
            and len(graphs.connected_components(h)) == 1:
        return "cycle", {"n": n}
    if m == n - 1 and all(d <= 2 for d in h.degrees()) \
            and len(graphs.connected_components(h)) == 1:
        return "path", {"n": n}
    return None, None


def _line_root(h: graphs.Graph, family, params):
    """Root graph for the skew-energy route, when one is known."""
    if family == "line-of":
        return graphs.from_json_dict(params["root"])
    if family == "cycle":
        return graphs.gen_family("cycle", n=params["n"])
    if family == "path":
        return graphs.gen_family("path", n=params["n"] + 1)
    if family == "complete":
        # K_n = L(K_1,n); the star is bipartite and edge-transitive
        return graphs.gen_family("complete-bipartite", r=1, s=params["n"])
    if family == "johnson" and params.get("k") == 2:
        return graphs.gen_family("complete", n=params["n"])
    if family == "merged-johnson" and params.get("k") == 2 \
            and list(params.get("intersections", [])) == [1]:
        return graphs.gen_family("complete", n=params["n"])
    if family == "rook":
        return graphs.gen_family("complete-bipartite", r=params["r"], s=params["s"])
    return None


def _closed_form_for(family, params):
    if family in ("complete", "cycle", "path"):
        return closed_form(family, **params)
    if family == "johnson" and params.get("k") == 2:
        return closed_form("johnson", n=params["n"], k=2)
    if family == "merged-johnson" and params.get("k") == 2 \
            and list(params.get("intersections", [])) == [1]:
        return closed_form("johnson", n=params["n"], k=2)
    if family == "rook":
        return closed_form("rook", r=params["r"], s=params["s"])
    if family == "line-of":
        root = graphs.from_json_dict(params["root"])
        if root.meta and root.meta.family == "hypercube":
            return closed_form("hypercube-line", d=root.meta.params["d"])
    return None


def _component_report(h: graphs.Graph, opts: ReportOptions) -> dict:
    rep: dict = {"n": h.n, "m": h.m}
    lowers: list[Bound] = []
    uppers: list[Bound] = []
    exact: Bound | None = None
    errors: list[dict] = []

    def attempt(fn, *args, **kw):
        nonlocal exact
        name = kw.pop("_name")
        try:
            b = fn(*args, **kw)
        except (CapExceeded, SolverError, ValidationError) as exc:
            errors.append({"method": name, "error": str(exc)})
            return
        for bound in (b if isinstance(b, list) else [b]):
            if bound.kind == "lower":
                lowers.append(bound)
            elif bound.kind == "upper":
                uppers.append(bound)
            else:
                lowers.append(replace(bound, kind="lower"))
                uppers.append(replace(bound, kind="upper"))
                if exact is None or bound.method.startswith("closed-form"):
                    exact = bound

    if h.n == 1:
        b = Bound(1.0, "single-vertex", "exact")
        return {"n": 1, "m": 0, "family": "single-vertex",
                "lower_bounds": [b.to_json_dict()], "upper_bounds": [b.to_json_dict()],
                "exact": b.to_json_dict(), "errors": [], "best_lower": 1.0,
                "best_upper": 1.0, "consistent": True}

    family, params = _recognize(h)
    rep["family"] = family or "custom"

    attempt(eta_lower_fractional, h, cap=opts.frac_cap, _name="fractional")
    attempt(eta_upper_lovasz, h, theta_cap=opts.theta_cap, _name="lovasz")
    strat = "search" if opts.subgraph_search else "clique"
    attempt(eta_upper_subgraph, h, strategy=strat, clique_cap=opts.clique_cap,
            theta_cap=opts.theta_cap, _name=f"subgraph-{strat}")

    if h.n <= opts.signing_vertex_cap:
        def signing_bound():
            try:
                obs = realization.realize_minimal(h)
            except CapExceeded:
                obs = realize_majorana_checked(h, opts.signing_dim_cap)
            if obs.dimension > opts.signing_dim_cap:
                raise CapExceeded(
                    f"signing dimension {obs.dimension} exceeds "
                    f"{opts.signing_dim_cap}")
            return eta_upper_signing(obs)
        attempt(signing_bound, _name="signing")
    else:
        errors.append({"method": "signing",
                       "error": f"skipped above {opts.signing_vertex_cap} vertices"})

    root = _line_root(h, family, params)
    if root is not None:
        attempt(eta_line_skew, root, class_cap=opts.class_cap, _name="line-skew")
        try:
            lowers.append(eta_lower_bipartite_energy(root))
        except (ValidationError, CapExceeded):
            pass  # root without the bipartite/edge-transitive guarantees

    cf = _closed_form_for(family, params) if family else None
    if cf is not None:
        attempt(lambda: cf.bounds(), _name=f"closed-form-{family}")

    if opts.exact_sdp:
        def sdp_bound():
            obs = realization.realize_minimal(h)
            res = eta_exact_sdp(obs, gap_tol=opts.sdp_gap, n_cap=opts.sdp_n_cap,
                                dim_cap=opts.sdp_dim_cap)
            return Bound(res.value, "sdp", "exact",
                         {"gap": res.gap, "dimension": obs.dimension})
        attempt(sdp_bound, _name="sdp")

    best_lower = max((b.value for b in lowers), default=0.0)
    best_upper = min((b.value for b in uppers), default=1.0)
    rep.update({
        "lower_bounds": [b.to_json_dict() for b in lowers],
        "upper_bounds": [b.to_json_dict() for b in uppers],
        "exact": exact.to_json_dict() if exact else None,
        "errors": errors,
        "best_lower": best_lower,
        "best_upper": best_upper,
        "consistent": best_lower <= best_upper + CONSISTENCY_TOL,
    })
    return rep


def realize_majorana_checked(h: graphs.Graph, dim_cap: int):
    obs = realization.realize_majorana(h)
    if obs.dimension > dim_cap:
        raise CapExceeded(f"realization dimension {obs.dimension} over {dim_cap}")
    return obs


def bounds_report(g: graphs.Graph, options: ReportOptions | None = None) -> dict:
    """Certified eta interval: twin-reduce, split into components, run every
    applicable method, and combine (eta of a disjoint union is the minimum
    over components)."""
    opts = options or ReportOptions()
    if g.n == 0:
        raise ValidationError("empty graph")
    reduced, mapping = graphs.twin_reduce(g)
    comps = graphs.connected_components(reduced)
    if len(comps) == 1 and reduced.n == g.n:
        parts = [reduced]  # keep metadata when nothing was collapsed
    else:
        parts = [graphs.induced_subgraph(reduced, c) for c in comps]
    sub = [_component_report(h, opts) for h in parts]

    lower = min(s["best_lower"] for s in sub)
    upper = min(s["best_upper"] for s in sub)
    exact = None
    if all(s["exact"] is not None for s in sub):
        exact = min((s["exact"]["value"] for s in sub))
    report = {
        "graph": {"n": g.n, "m": g.m,
                  "family": g.meta.family if g.meta else "custom"},
        "reduced": {"n": reduced.n, "m": reduced.m},
        "twin_mapping": {str(k): v for k, v in mapping.items()},
        "components": sub,
        "eta_lower": lower,
        "eta_upper": upper,
        "eta_exact": exact,
        "consistent": all(s["consistent"] for s in sub)
        and lower <= upper + CONSISTENCY_TOL,
    }
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
