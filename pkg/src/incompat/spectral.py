"""Adjacency and skew spectra, switching classes, and matrix certificates.

An orientation of G is stored as one sign per edge: +1 means the edge points
from the lower to the higher endpoint.  Its skew matrix S has S_uv = +1 and
S_vu = -1 for an edge oriented u -> v.  Reversing all edges at a vertex
(switching) conjugates S by a diagonal sign matrix, so the skew spectrum only
depends on the switching class; fixing a spanning tree to all-plus signs
leaves exactly one representative per class, indexed by the co-tree signs.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _config, graphs
from .errors import CapExceeded, ValidationError


@dataclass(frozen=True)
class Orientation:
    base: graphs.Graph
    signs: tuple[int, ...]  # one +1/-1 per edge, edge order of base.edges
    tree_edges: tuple[int, ...] | None = None  # gauge tree (edge indices)
    cotree_bits: str | None = None  # '1' = flipped co-tree edge

    def __post_init__(self):
        if len(self.signs) != self.base.m:
            raise ValidationError("one sign per edge required")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValidationError("signs must be +1 or -1")


@dataclass(frozen=True)
class SpectralSummary:
    magnitudes: tuple[float, ...]  # descending
    energy: float
    kind: str  # "adjacency" | "skew"


def adjacency_matrix(g: graphs.Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a


def skew_matrix(o: Orientation) -> np.ndarray:
    s = np.zeros((o.base.n, o.base.n))
    for (u, v), sign in zip(o.base.edges, o.signs):
        s[u, v] = float(sign)
        s[v, u] = -float(sign)
    return s


def eigenvalues_symmetric(mat: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix, ascending."""
    return np.linalg.eigvalsh(mat)


def singular_values(mat: np.ndarray) -> np.ndarray:
    """Singular values, descending."""
    return np.linalg.svd(mat, compute_uv=False)


def graph_energy(g: graphs.Graph) -> float:
    return float(np.abs(eigenvalues_symmetric(adjacency_matrix(g))).sum())


def skew_energy(o: Orientation) -> float:
    return float(singular_values(skew_matrix(o)).sum())


def adjacency_summary(g: graphs.Graph) -> SpectralSummary:
    mags = np.sort(np.abs(eigenvalues_symmetric(adjacency_matrix(g))))[::-1]
    return SpectralSummary(tuple(float(x) for x in mags), float(mags.sum()),
                           "adjacency")


def skew_summary(o: Orientation) -> SpectralSummary:
    mags = singular_values(skew_matrix(o))
    return SpectralSummary(tuple(float(x) for x in mags), float(mags.sum()),
                           "skew")


# ---------------------------------------------------------------------------
# switching classes


def _spanning_tree(g: graphs.Graph) -> list[int]:
    """Edge indices of a BFS tree; requires g connected."""
    if g.n == 0:
        return []
    edge_index = {e: i for i, e in enumerate(g.edges)}
    seen = [False] * g.n
    seen[0] = True
    frontier = [0]
    tree = []
    while frontier:
        u = frontier.pop(0)
        mask = g.adjacency[u]
        while mask:
            v = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            if not seen[v]:
                seen[v] = True
                frontier.append(v)
                tree.append(edge_index[(u, v) if u < v else (v, u)])
    if not all(seen):
        raise ValidationError("switching classes need a connected graph; "
                              "split components first")
    return sorted(tree)


def switching_classes(g: graphs.Graph, cap: int | None = None):
    """Yield one orientation per switching class (exactly 2^(m-n+1) many).

    Tree edges are pinned to +1; every co-tree sign pattern gives a distinct
    class because a switching that fixes all tree signs must be constant.
    Patterns are emitted in lexicographic bitstring order.
    """
    if cap is None:
        cap = _config.get("max_classes")
    tree = _spanning_tree(g)
    cotree = [i for i in range(g.m) if i not in set(tree)]
    k = len(cotree)
    if k > cap:
        raise CapExceeded(f"co-tree rank {k} exceeds cap {cap}")
    tree_t = tuple(tree)
    for pattern in range(1 << k):
        signs = [1] * g.m
        bits = []
        for t in range(k):
            bit = (pattern >> (k - 1 - t)) & 1
            bits.append("1" if bit else "0")
            if bit:
                signs[cotree[t]] = -1
        yield Orientation(g, tuple(signs), tree_t, "".join(bits))


def max_skew_energy(g: graphs.Graph, cap: int | None = None,
                    threads: int | None = None):
    """Maximum skew energy over switching classes, with a witness.

    Ties go to the lexicographically smallest co-tree sign pattern.
    """
    if threads is None:
        threads = _config.get("threads")
    reps = list(switching_classes(g, cap))

    def energy(o: Orientation) -> float:
        return skew_energy(o)

    if threads > 1 and len(reps) >= 4 * threads:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            energies = list(pool.map(energy, reps))
    else:
        energies = [energy(o) for o in reps]
    best_i = 0
    for i in range(1, len(reps)):
        if energies[i] > energies[best_i]:
            best_i = i
    return energies[best_i], reps[best_i]


# ---------------------------------------------------------------------------
# integer matrix certificates


@dataclass(frozen=True)
class CertificateReport:
    rows: int
    cols: int
    weighing: int | None  # k with M^T M = k*I, if square and it holds
    conference: bool
    skew_conference: bool
    hadamard: bool
    partial_hadamard: bool

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols, "weighing": self.weighing,
            "conference": self.conference,
            "skew_conference": self.skew_conference,
            "hadamard": self.hadamard,
            "partial_hadamard": self.partial_hadamard,
        }


def matrix_certificates(mat) -> CertificateReport:
    """Exact integer tests for weighing / conference / Hadamard structure."""
    m = [[int(x) for x in row] for row in np.asarray(mat)]
    r = len(m)
    c = len(m[0]) if r else 0
    if any(len(row) != c for row in m):
        raise ValidationError("ragged matrix")
    if any(x not in (-1, 0, 1) for row in m for x in row):
        raise ValidationError("entries must be 0, +1 or -1")

    def gram(a, b_t):  # exact integer a @ b_t^T
        return [[sum(x * y for x, y in zip(ra, rb)) for rb in b_t] for ra in a]

    mmt = gram(m, m)
    weighing = None
    conference = skew = hadamard = False
    if r == c and r > 0:
        mtm = gram([list(col) for col in zip(*m)], [list(col) for col in zip(*m)])
        k = mtm[0][0]
        if all(mtm[i][j] == (k if i == j else 0) for i in range(r) for j in range(r)):
            weighing = k
        zero_diag = all(m[i][i] == 0 for i in range(r))
        pm_off = all(m[i][j] in (-1, 1) for i in range(r) for j in range(r) if i != j)
        ident = all(mmt[i][j] == ((r - 1) if i == j else 0)
                    for i in range(r) for j in range(r))
        conference = zero_diag and pm_off and ident
        skew = conference and all(m[i][j] == -m[j][i]
                                  for i in range(r) for j in range(r))
        hadamard = (all(x in (-1, 1) for row in m for x in row)
                    and all(mmt[i][j] == (r if i == j else 0)
                            for i in range(r) for j in range(r)))
    partial = (r > 0 and all(x in (-1, 1) for row in m for x in row)
               and all(mmt[i][j] == (c if i == j else 0)
                       for i in range(r) for j in range(r)))
    return CertificateReport(r, c, weighing, conference, skew, hadamard, partial)


# ---------------------------------------------------------------------------
# serialization


def orientation_to_json_dict(o: Orientation) -> dict:
    d = {"graph": graphs.to_json_dict(o.base),
         "signs": list(o.signs)}
    if o.tree_edges is not None:
        d["tree_edges"] = list(o.tree_edges)
    if o.cotree_bits is not None:
        d["cotree_signs"] = o.cotree_bits
    return d


def orientation_from_json_dict(d: dict) -> Orientation:
    if "graph" not in d or "signs" not in d:
        raise ValidationError("orientation JSON needs 'graph' and 'signs'")
    g = graphs.from_json_dict(d["graph"])
    return Orientation(g, tuple(int(s) for s in d["signs"]),
                       tuple(d["tree_edges"]) if "tree_edges" in d else None,
                       d.get("cotree_signs"))


def orientation_to_json(o: Orientation) -> str:
    return json.dumps(orientation_to_json_dict(o), sort_keys=True)


def orientation_from_json(text: str) -> Orientation:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad orientation JSON: {exc}") from exc
    return orientation_from_json_dict(d)
