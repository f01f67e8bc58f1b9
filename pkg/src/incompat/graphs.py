"""Undirected simple graphs: families, structure operations, serialization.

Vertices are 0..n-1.  Edges are stored sorted as (u, v) with u < v, and the
adjacency is kept redundantly as one bitmask per vertex, which is what the
search routines (cliques, automorphisms, F2 rank) actually work on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb

from .errors import CapExceeded, InternalInconsistency, ValidationError

FAMILIES = (
    "complete",
    "cycle",
    "path",
    "complete-bipartite",
    "hypercube",
    "johnson",
    "merged-johnson",
    "rook",
    "line-of",
    "custom",
)


@dataclass(frozen=True)
class FamilyMeta:
    """Provenance tag for generated graphs.

    Flags are tri-state: True/False only when the generator can guarantee the
    value, None when it makes no claim.
    """

    family: str
    params: dict = field(default_factory=dict)
    vertex_transitive: bool | None = None
    edge_transitive: bool | None = None
    bipartite: bool | None = None
    regular_degree: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "vertex_transitive": self.vertex_transitive,
            "edge_transitive": self.edge_transitive,
            "bipartite": self.bipartite,
            "regular_degree": self.regular_degree,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "FamilyMeta":
        if d.get("family") not in FAMILIES:
            raise ValidationError(f"unknown family tag {d.get('family')!r}")
        return FamilyMeta(
            family=d["family"],
            params=d.get("params", {}),
            vertex_transitive=d.get("vertex_transitive"),
            edge_transitive=d.get("edge_transitive"),
            bipartite=d.get("bipartite"),
            regular_degree=d.get("regular_degree"),
        )


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[int, ...]  # bitmask of neighbours per vertex
    meta: FamilyMeta | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adjacency[u] >> v) & 1)

    def __repr__(self) -> str:  # keep test failure output short
        tag = self.meta.family if self.meta else "graph"
        return f"<{tag} n={self.n} m={self.m}>"


@dataclass(frozen=True)
class EdgeLabeling:
    """Map from line-graph vertex index to the root edge it came from."""

    root_edges: tuple[tuple[int, int], ...]

    def __getitem__(self, i: int) -> tuple[int, int]:
        return self.root_edges[i]

    def __len__(self) -> int:
        return len(self.root_edges)


@dataclass(frozen=True)
class TransitivityFlags:
    vertex_transitive: bool
    edge_transitive: bool


def new_graph(n, edges, meta: FamilyMeta | None = None) -> Graph:
    """Validate and normalize an edge list into a Graph."""
    if n < 0:
        raise ValidationError("vertex count must be nonnegative")
    norm = []
    for e in edges:
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge {e} out of range for n={n}")
        if u == v:
            raise ValidationError(f"self-loop at vertex {u}")
        norm.append((u, v) if u < v else (v, u))
    norm.sort()
    for a, b in zip(norm, norm[1:]):
        if a == b:
            raise ValidationError(f"duplicate edge {a}")
    adj = [0] * n
    for u, v in norm:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n=n, edges=tuple(norm), adjacency=tuple(adj), meta=meta)


# ---------------------------------------------------------------------------
# families


def _colex_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    # colex: compare reversed tuples; combinations() already yields sorted sets
    return sorted(combinations(range(n), k), key=lambda c: tuple(reversed(c)))


def gen_family(family: str, **params) -> Graph:
    """Generate a named family instance with provenance metadata.

    Parameters by family: complete/cycle/path n; complete-bipartite r, s;
    hypercube d; johnson n, k; merged-johnson n, k, intersections;
    rook r, s.
    """
    if family == "complete":
        n = _need_int(params, "n", low=1)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
        meta = FamilyMeta("complete", {"n": n}, True, True, n <= 2, n - 1)
        return new_graph(n, edges, meta)

    if family == "cycle":
        n = _need_int(params, "n", low=3)
        edges = [(i, (i + 1) % n) for i in range(n)]
        meta = FamilyMeta("cycle", {"n": n}, True, True, n % 2 == 0, 2)
        return new_graph(n, edges, meta)

    if family == "path":
        n = _need_int(params, "n", low=1)
        edges = [(i, i + 1) for i in range(n - 1)]
        vt = n <= 2
        et = n <= 3
        reg = {1: 0, 2: 1}.get(n)
        meta = FamilyMeta("path", {"n": n}, vt, et, True, reg)
        return new_graph(n, edges, meta)

    if family == "complete-bipartite":
        r = _need_int(params, "r", low=1)
        s = _need_int(params, "s", low=1)
        edges = [(i, r + j) for i in range(r) for j in range(s)]
        meta = FamilyMeta(
            "complete-bipartite", {"r": r, "s": s},
            vertex_transitive=(r == s), edge_transitive=True,
            bipartite=True, regular_degree=(s if r == s else None),
        )
        return new_graph(r + s, edges, meta)

    if family == "hypercube":
        d = _need_int(params, "d", low=1)
        n = 1 << d
        edges = [(u, u ^ (1 << b)) for u in range(n) for b in range(d) if u < u ^ (1 << b)]
        meta = FamilyMeta("hypercube", {"d": d}, True, True, True, d)
        return new_graph(n, edges, meta)

    if family == "johnson":
        n = _need_int(params, "n", low=1)
        k = _need_int(params, "k", low=1)
        if k > n:
            raise ValidationError("johnson requires n >= k")
        g = _merged_johnson(n, k, (k - 1,))
        meta = FamilyMeta("johnson", {"n": n, "k": k}, True, True, None,
                          k * (n - k))
        return replace(g, meta=meta)

    if family == "merged-johnson":
        n = _need_int(params, "n", low=1)
        k = _need_int(params, "k", low=1)
        if k > n:
            raise ValidationError("merged-johnson requires n >= k")
        ell = params.get("intersections")
        if ell is None:
            raise ValidationError("merged-johnson requires intersections")
        ell = tuple(sorted(set(int(i) for i in ell)))
        if any(i < 0 or i >= k for i in ell):
            raise ValidationError("intersections must lie in {0..k-1}")
        g = _merged_johnson(n, k, ell)
        degree = sum(comb(k, i) * comb(n - k, k - i) for i in ell)
        meta = FamilyMeta(
            "merged-johnson", {"n": n, "k": k, "intersections": list(ell)},
            vertex_transitive=True,
            edge_transitive=(True if len(ell) == 1 else None),
            bipartite=None, regular_degree=degree,
        )
        return replace(g, meta=meta)

    if family == "rook":
        r = _need_int(params, "r", low=1)
        s = _need_int(params, "s", low=1)
        edges = []
        for a in range(r):
            for b in range(s):
                v = a * s + b
                for b2 in range(b + 1, s):
                    edges.append((v, a * s + b2))
                for a2 in range(a + 1, r):
                    edges.append((v, a2 * s + b))
        meta = FamilyMeta("rook", {"r": r, "s": s}, True, r == s, None, r + s - 2)
        return new_graph(r * s, edges, meta)

    raise ValidationError(f"unknown family {family!r}")


def _merged_johnson(n: int, k: int, ell: tuple[int, ...]) -> Graph:
    subsets = _colex_subsets(n, k)
    sets = [frozenset(s) for s in subsets]
    edges = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if len(sets[i] & sets[j]) in ell:
                edges.append((i, j))
    return new_graph(len(sets), edges)


def _need_int(params, name, low):
    if name not in params:
        raise ValidationError(f"missing parameter {name}")
    v = int(params[name])
    if v < low:
        raise ValidationError(f"parameter {name}={v} must be >= {low}")
    return v


# ---------------------------------------------------------------------------
# structure operations


def complement(g: Graph) -> Graph:
    edges = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)
             if not g.has_edge(u, v)]
    return new_graph(g.n, edges)


def induced_subgraph(g: Graph, vertices) -> Graph:
    vs = sorted(set(vertices))
    if any(v < 0 or v >= g.n for v in vs):
        raise ValidationError("vertex out of range")
    pos = {v: i for i, v in enumerate(vs)}
    edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    return new_graph(len(vs), edges)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    # vertex (a, b) -> a*h.n + b
    edges = []
    for a in range(g.n):
        for b in range(h.n):
            v = a * h.n + b
            for b2 in range(h.n):
                if h.has_edge(b, b2) and b < b2:
                    edges.append((v, a * h.n + b2))
            for a2 in range(g.n):
                if g.has_edge(a, a2) and a < a2:
                    edges.append((v, a2 * h.n + b))
    return new_graph(g.n * h.n, edges)


def is_bipartite(g: Graph):
    """Two-color g; returns (side0, side1) vertex tuples or None."""
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            u = queue.pop()
            mask = g.adjacency[u]
            while mask:
                v = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    side0 = tuple(v for v in range(g.n) if color[v] == 0)
    side1 = tuple(v for v in range(g.n) if color[v] == 1)
    return side0, side1


def connected_components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            mask = g.adjacency[u]
            while mask:
                v = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def line_graph(g: Graph) -> tuple[Graph, EdgeLabeling]:
    """Line graph and the labeling of its vertices by root edges."""
    m = g.m
    edges = []
    for i in range(m):
        u1, v1 = g.edges[i]
        for j in range(i + 1, m):
            u2, v2 = g.edges[j]
            if u1 in (u2, v2) or v1 in (u2, v2):
                edges.append((i, j))
    reg = None
    if g.meta is not None:
        if g.meta.regular_degree is not None:
            reg = 2 * g.meta.regular_degree - 2
        elif g.meta.family == "complete-bipartite":
            reg = g.meta.params["r"] + g.meta.params["s"] - 2
    meta = FamilyMeta(
        "line-of", {"root": to_json_dict(g)},
        vertex_transitive=(True if g.meta and g.meta.edge_transitive else None),
        edge_transitive=None, bipartite=None, regular_degree=reg,
    )
    lg = new_graph(m, edges, meta)
    # sanity: line-graph degree law deg(uv) = deg(u)+deg(v)-2
    for i, (u, v) in enumerate(g.edges):
        if lg.degree(i) != g.degree(u) + g.degree(v) - 2:
            raise InternalInconsistency("line graph degree law violated")
    return lg, EdgeLabeling(g.edges)


def twin_reduce(g: Graph) -> tuple[Graph, dict[int, int]]:
    """Collapse non-adjacent vertices with identical neighborhoods.

    Returns the reduced graph and a map original vertex -> new index.
    Twins carry the same observable constraints, so dropping them never
    changes the robustness value.
    """
    alive = list(range(g.n))
    adj = list(g.adjacency)
    rep = list(range(g.n))
    changed = True
    while changed:
        changed = False
        for i in range(len(alive)):
            u = alive[i]
            for j in range(i + 1, len(alive)):
                v = alive[j]
                if (adj[u] >> v) & 1:
                    continue
                if adj[u] == adj[v]:
                    rep[v] = u
                    for w in alive:
                        adj[w] &= ~(1 << v)
                    adj[v] = 0
                    alive.pop(j)
                    changed = True
                    break
            if changed:
                break
    if len(alive) == g.n:
        return g, {v: v for v in range(g.n)}
    pos = {v: i for i, v in enumerate(alive)}
    edges = []
    for i, u in enumerate(alive):
        mask = adj[u]
        while mask:
            v = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            if u < v:
                edges.append((pos[u], pos[v]))
    mapping = {}
    for v in range(g.n):
        r = v
        while rep[r] != r:
            r = rep[r]
        mapping[v] = pos[r]
    return new_graph(len(alive), edges), mapping


def f2_rank(g: Graph) -> int:
    """Rank of the adjacency matrix over F2 (always even: the form is
    alternating with zero diagonal)."""
    rows = list(g.adjacency)
    rank = 0
    for col in range(g.n):
        piv = None
        for i in range(rank, g.n):
            if (rows[i] >> col) & 1:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(g.n):
            if i != rank and (rows[i] >> col) & 1:
                rows[i] ^= rows[rank]
        rank += 1
    if rank % 2:
        raise InternalInconsistency("alternating form with odd rank")
    return rank


# ---------------------------------------------------------------------------
# automorphisms


def _signatures(g: Graph) -> list[tuple]:
    degs = g.degrees()
    sigs = []
    for v in range(g.n):
        nb = []
        mask = g.adjacency[v]
        while mask:
            w = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            nb.append(degs[w])
        sigs.append((degs[v], tuple(sorted(nb))))
    return sigs


def _extend_map(g: Graph, h: Graph, pins) -> bool:
    """Search for an adjacency-preserving bijection g -> h honoring pins."""
    sg, sh = _signatures(g), _signatures(h)
    img = [-1] * g.n
    used = [False] * h.n
    for a, b in pins:
        if sg[a] != sh[b] or used[b]:
            return False
        img[a] = b
        used[b] = True
    order = [a for a, _ in pins]
    placed = set(order)
    while len(order) < g.n:
        # prefer vertices touching already-placed ones: fail fast
        best, best_key = None, (-1, -1)
        for v in range(g.n):
            if v in placed:
                continue
            hits = sum(1 for u in placed if g.has_edge(u, v))
            key = (hits, g.degree(v))
            if key > best_key:
                best, best_key = v, key
        order.append(best)
        placed.add(best)

    def down(k: int) -> bool:
        if k == len(order):
            return True
        a = order[k]
        for b in range(h.n):
            if used[b] or sg[a] != sh[b]:
                continue
            ok = True
            for a2 in order[:k]:
                if g.has_edge(a, a2) != h.has_edge(b, img[a2]):
                    ok = False
                    break
            if ok:
                img[a] = b
                used[b] = True
                if down(k + 1):
                    return True
                used[b] = False
                img[a] = -1
        return False

    return down(len(pins))


def check_transitivity(g: Graph, cap: int = 12) -> TransitivityFlags:
    """Decide vertex- and edge-transitivity by automorphism search.

    Exact but exponential in the worst case, hence the vertex cap.
    """
    if g.n > cap:
        raise CapExceeded(f"transitivity check capped at {cap} vertices")
    if g.n == 0:
        return TransitivityFlags(True, True)
    vt = all(_extend_map(g, g, [(0, v)]) for v in range(g.n))
    if g.m == 0:
        return TransitivityFlags(vt, True)
    e0 = g.edges[0]
    et = True
    for e in g.edges:
        if _extend_map(g, g, [(e0[0], e[0]), (e0[1], e[1])]):
            continue
        if _extend_map(g, g, [(e0[0], e[1]), (e0[1], e[0])]):
            continue
        et = False
        break
    return TransitivityFlags(vt, et)


def is_isomorphic(g: Graph, h: Graph, cap: int = 16) -> bool:
    if max(g.n, h.n) > cap:
        raise CapExceeded(f"isomorphism check capped at {cap} vertices")
    if g.n != h.n or g.m != h.m:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    if g.n == 0:
        return True
    return _extend_map(g, h, [])


# ---------------------------------------------------------------------------
# serialization


def to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty graph text")
    try:
        n, m = map(int, lines[0].split())
    except ValueError as exc:
        raise ValidationError(f"bad header line {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise ValidationError(f"expected {m} edge lines, got {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        try:
            u, v = map(int, ln.split())
        except ValueError as exc:
            raise ValidationError(f"bad edge line {ln!r}") from exc
        edges.append((u, v))
    return new_graph(n, edges)


def to_json_dict(g: Graph) -> dict:
    d = {"n": g.n, "edges": [list(e) for e in g.edges]}
    if g.meta is not None:
        d["meta"] = g.meta.to_json_dict()
    return d


def from_json_dict(d: dict) -> Graph:
    if "n" not in d or "edges" not in d:
        raise ValidationError("graph JSON needs 'n' and 'edges'")
    meta = FamilyMeta.from_json_dict(d["meta"]) if d.get("meta") else None
    return new_graph(d["n"], [tuple(e) for e in d["edges"]], meta)


def to_json(g: Graph) -> str:
    return json.dumps(to_json_dict(g), sort_keys=True)


def from_json(text: str) -> Graph:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad graph JSON: {exc}") from exc
    return from_json_dict(d)
