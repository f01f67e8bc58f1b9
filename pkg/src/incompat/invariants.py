"""Combinatorial graph invariants: clique, independence, chromatic numbers,
the fractional chromatic number with an exact rational witness, and the
Lovasz theta function.

Cliques use branch and bound with a greedy-coloring bound on bitmasks.
The fractional chromatic LP runs in exact Fraction arithmetic (Bland's rule
on the packing dual), so the returned value is a certified rational and the
a:b coloring witness is integral by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import graphs, sdp
from .errors import CapExceeded, SolverError, ValidationError


# ---------------------------------------------------------------------------
# cliques and independent sets


def _greedy_color_order(adj, cand):
    """Order candidate vertices with greedy color-class bounds (Tomita)."""
    order, bounds = [], []
    color = 0
    rest = cand
    while rest:
        color += 1
        avail = rest
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v)
            avail &= ~adj[v]
            rest &= ~(1 << v)
            order.append(v)
            bounds.append(color)
    return order, bounds


def _max_clique(adj, n):
    best = [0, 0]  # size, mask

    def expand(size, mask, cand):
        order, bounds = _greedy_color_order(adj, cand)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            bit = 1 << v
            expand(size + 1, mask | bit, cand & adj[v])
            cand &= ~bit
        if size > best[0]:
            best[0] = size
            best[1] = mask

    expand(0, 0, (1 << n) - 1)
    return best[0], best[1]


def max_clique(g: graphs.Graph, cap: int = 40) -> tuple[int, ...]:
    """A maximum clique as a sorted vertex tuple."""
    if g.n > cap:
        raise CapExceeded(f"clique search capped at {cap} vertices")
    if g.n == 0:
        return ()
    _, mask = _max_clique(g.adjacency, g.n)
    return tuple(v for v in range(g.n) if (mask >> v) & 1)


def clique_number(g: graphs.Graph, cap: int = 40) -> int:
    return len(max_clique(g, cap))


def independence_number(g: graphs.Graph, cap: int = 40) -> int:
    return clique_number(graphs.complement(g), cap)


def max_independent_set(g: graphs.Graph, cap: int = 40) -> tuple[int, ...]:
    return max_clique(graphs.complement(g), cap)


# ---------------------------------------------------------------------------
# chromatic number


def _greedy_coloring(g: graphs.Graph) -> list[int]:
    # DSATUR greedy; good enough as an upper bound to start the exact search
    n = g.n
    colors = [-1] * n
    sat = [0] * n  # bitmask of neighbour colors
    for _ in range(n):
        v = max((u for u in range(n) if colors[u] < 0),
                key=lambda u: (sat[u].bit_count(), g.degree(u)))
        c = 0
        while (sat[v] >> c) & 1:
            c += 1
        colors[v] = c
        mask = g.adjacency[v]
        while mask:
            w = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            sat[w] |= 1 << c
    return colors

def _colorable(g: graphs.Graph, k: int, seed_clique, budget: list[int]) -> bool:
    n = g.n
    colors = [-1] * n
    for c, v in enumerate(seed_clique):
        colors[v] = c

    def down() -> bool:
        budget[0] -= 1
        if budget[0] <= 0:
            raise CapExceeded("coloring search budget exhausted")
        v, best_forbid = -1, -1
        used_max = max(colors) if any(c >= 0 for c in colors) else -1
        for u in range(n):
            if colors[u] >= 0:
                continue
            forbid = 0
            mask = g.adjacency[u]
            while mask:
                w = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                if colors[w] >= 0:
                    forbid |= 1 << colors[w]
            cnt = forbid.bit_count()
            if cnt > best_forbid or (cnt == best_forbid and v >= 0
                                     and g.degree(u) > g.degree(v)):
                v, best_forbid, vf = u, cnt, forbid
        if v < 0:
            return True
        # allow at most one brand-new color index: breaks color symmetry
        top = min(k - 1, used_max + 1)
        for c in range(top + 1):
            if (vf >> c) & 1:
                continue
            colors[v] = c
            if down():
                return True
            colors[v] = -1
        return False

    return down()


def chromatic_number(g: graphs.Graph, cap: int = 40,
                     budget: int = 20_000_000) -> int:
    if g.n > cap:
        raise CapExceeded(f"coloring capped at {cap} vertices")
    if g.n == 0:
        return 0
    if g.m == 0:
        return 1
    clique = max_clique(g, cap)
    lower = len(clique)
    upper = max(_greedy_coloring(g)) + 1
    if lower == upper:
        return lower
    state = [budget]
    for k in range(lower, upper):
        if _colorable(g, k, clique, state):
            return k
    return upper


# ---------------------------------------------------------------------------
# fractional chromatic number


@dataclass(frozen=True)
class FractionalColoring:
    value: Fraction
    a: int  # palette size
    b: int  # colors per vertex
    classes: tuple[frozenset, ...] | None  # one independent set per color
    vertex_colors: tuple[tuple[int, ...], ...] | None
    verified: bool
    source: str  # "exact-lp" | "transitive-formula"

    @property
    def float_value(self) -> float:
        return float(self.value)


def _maximal_independent_sets(g: graphs.Graph, limit: int):
    """Bron-Kerbosch with pivoting on the complement."""
    comp = graphs.complement(g)
    adj = comp.adjacency
    n = g.n
    out = []

    def bk(r, p, x):
        if len(out) > limit:
            raise CapExceeded(f"more than {limit} maximal independent sets")
        if not p and not x:
            out.append(r)
            return
        pivot = max(_bits(p | x), key=lambda u: (adj[u] & p).bit_count())
        ext = p & ~adj[pivot]
        while ext:
            v = (ext & -ext).bit_length() - 1
            ext &= ext - 1
            bit = 1 << v
            bk(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    if n:
        bk(0, (1 << n) - 1, 0)
    return out


def _bits(mask: int):
    while mask:
        yield (mask & -mask).bit_length() - 1
        mask &= mask - 1


def _packing_simplex(n_verts: int, sets: list[int]):
    """Solve max 1^T y, sum_{v in S} y_v <= 1 per set, y >= 0, exactly.

    Returns (optimum, covering weights x_S) where x is the dual optimum read
    off the slack columns; both are exact Fractions.
    """
    m = len(sets)
    n = n_verts
    zero, one = Fraction(0), Fraction(1)
    # tableau rows: m constraints; columns: n vars + m slacks + rhs
    tab = [[zero] * (n + m + 1) for _ in range(m + 1)]
    for i, s in enumerate(sets):
        row = tab[i]
        for v in _bits(s):
            row[v] = one
        row[n + i] = one
        row[-1] = one
    for v in range(n):
        tab[m][v] = -one  # maximize sum y  ->  minimize -sum
    basis = [n + i for i in range(m)]

    while True:
        # Bland: entering = first column with negative reduced cost
        enter = next((j for j in range(n + m) if tab[m][j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise ValidationError("packing LP unbounded; graph data corrupt")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m + 1):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        basis[leave] = enter

    optimum = tab[m][-1]
    cover = [tab[m][n + i] for i in range(m)]  # dual values off slack columns
    return optimum, cover


def fractional_chromatic(g: graphs.Graph, cap: int = 30,
                         set_limit: int = 20000) -> FractionalColoring:
    """Exact fractional chromatic number with an a:b coloring witness.

    Vertex-transitive graphs (flagged by their generator) fall back to the
    closed form |V|/alpha when the LP would be too large.
    """
    if g.n == 0:
        raise ValidationError("fractional chromatic needs a vertex")
    if g.m == 0:
        return FractionalColoring(Fraction(1), 1, 1,
                                  (frozenset(range(g.n)),),
                                  tuple((0,) for _ in range(g.n)),
                                  True, "exact-lp")
    transitive = bool(g.meta and g.meta.vertex_transitive)
    if g.n > cap:
        if transitive:
            alpha = independence_number(g)
            val = Fraction(g.n, alpha)
            return FractionalColoring(val, val.numerator, val.denominator,
                                      None, None, True, "transitive-formula")
        raise CapExceeded(f"fractional chromatic capped at {cap} vertices")

    sets = _maximal_independent_sets(g, set_limit)
    value, cover = _packing_simplex(g.n, sets)

    denom = 1
    for x in cover:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    b = denom
    counts = [int(x * b) for x in cover]
    a = sum(counts)
    if Fraction(a, b) != value:
        raise ValidationError("rational witness disagrees with LP optimum")
    classes = []
    for s, cnt in zip(sets, counts):
        classes += [frozenset(_bits(s))] * cnt
    vertex_colors = []
    for v in range(g.n):
        mine = tuple(i for i, cl in enumerate(classes) if v in cl)
        if len(mine) < b:
            raise ValidationError("covering witness failed verification")
        vertex_colors.append(mine[:b])
    # adjacent vertices can never share a color: each class is independent
    if transitive:
        alpha = independence_number(g)
        if value != Fraction(g.n, alpha):
            raise ValidationError("LP value disagrees with |V|/alpha on a "
                                  "vertex-transitive graph")
    return FractionalColoring(value, a, b, tuple(classes),
                              tuple(vertex_colors), True, "exact-lp")


# ---------------------------------------------------------------------------
# Lovasz theta


@dataclass
class ThetaResult:
    value: float  # midpoint of [lower, upper]
    lower: float  # from the feasible primal matrix
    upper: float  # from the dual objective
    gap: float
    certificate: np.ndarray  # primal X

    def to_json_dict(self) -> dict:
        return {"value": self.value, "gap": self.gap}


def lovasz_theta(g: graphs.Graph, cap: int = 80,
                 gap_tol: float = 1e-7) -> ThetaResult:
    """theta(G) = max tr(J X) over psd X with tr X = 1, X_uv = 0 on edges."""
    if g.n > cap:
        raise CapExceeded(f"theta capped at {cap} vertices")
    if g.n == 0:
        raise ValidationError("theta needs a vertex")
    n = g.n
    prob = sdp.SdpProblem([n])
    prob.set_objective_block(0, np.ones((n, n)))
    prob.add_constraint(1.0, {0: np.eye(n)})
    for u, v in g.edges:
        e = np.zeros((n, n))
        e[u, v] = e[v, u] = 1.0
        prob.add_constraint(0.0, {0: e})

    # strictly feasible warm start on both sides keeps every iterate feasible
    x0 = [np.eye(n) / n]
    z0 = np.zeros(prob.p)
    z0[0] = n + 1.0
    s0 = [(n + 1.0) * np.eye(n) - np.ones((n, n))]
    sol = sdp.solve(prob, gap_tol=gap_tol, start=(x0, np.zeros(0), z0, s0))
    if sol.status != "optimal":
        raise SolverError(f"theta solve ended with status {sol.status}",
                          lower=sol.primal_value, upper=sol.dual_value)
    lower, upper = sol.primal_value, sol.dual_value
    return ThetaResult((lower + upper) / 2, lower, upper, upper - lower,
                       sol.blocks[0])


# ---------------------------------------------------------------------------
# aggregate report


def invariants_report(g: graphs.Graph, theta_cap: int = 80) -> dict:
    """JSON-ready summary used by the CLI."""
    rep: dict = {}
    try:
        rep["alpha"] = independence_number(g)
        rep["omega"] = clique_number(g)
        rep["chi"] = chromatic_number(g)
    except CapExceeded as exc:
        rep["combinatorial_error"] = str(exc)
    try:
        fc = fractional_chromatic(g)
        rep["chi_f"] = {"p": fc.value.numerator, "q": fc.value.denominator,
                        "verified": fc.verified}
    except CapExceeded as exc:
        rep["chi_f"] = {"error": str(exc)}
    try:
        th = lovasz_theta(g, cap=theta_cap)
        rep["theta"] = {"value": th.value, "gap": th.gap}
    except (CapExceeded, SolverError) as exc:
        rep["theta"] = {"error": str(exc)}
    return rep
