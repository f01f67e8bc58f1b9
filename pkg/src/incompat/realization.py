"""Majorana monomial observables and realizations of anti-commutativity graphs.

A monomial A_I = i^alpha * Gamma_{i1} ... Gamma_{ik} (indices increasing,
1-based) is Hermitian and squares to the identity when alpha = floor(k/2)
mod 4.  Two monomials anti-commute iff |I||J| - |I@J| is odd, where @ is
intersection.  Matrices use the Jordan-Wigner convention
Gamma_{2j-1} = Z^(j-1) X_j, Gamma_{2j} = Z^(j-1) Y_j, kept internally as
phase/X-mask/Z-mask triples so products cost O(1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import graphs
from .errors import CapExceeded, InternalInconsistency, ValidationError

DIM_CAP = 1 << 13  # largest dense matrix dimension we will materialize


@dataclass(frozen=True)
class MajoranaMonomial:
    indices: tuple[int, ...]  # strictly increasing, 1-based mode labels
    phase_exponent: int       # power of i, mod 4

    def __post_init__(self):
        idx = self.indices
        if any(i < 1 for i in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValidationError(f"bad index set {idx}")
        object.__setattr__(self, "phase_exponent", self.phase_exponent % 4)

    @property
    def degree(self) -> int:
        return len(self.indices)


def monomial(indices, phase_exponent: int | None = None) -> MajoranaMonomial:
    """Build a monomial; the default phase makes it Hermitian."""
    idx = tuple(sorted(int(i) for i in indices))
    if phase_exponent is None:
        phase_exponent = (len(idx) // 2) % 4
    return MajoranaMonomial(idx, phase_exponent)


def anticommutes(a: MajoranaMonomial, b: MajoranaMonomial) -> bool:
    shared = len(set(a.indices) & set(b.indices))
    return (a.degree * b.degree - shared) % 2 == 1


@dataclass(frozen=True)
class ObservableSet:
    monomials: tuple[MajoranaMonomial, ...]
    mode_count: int

    def __post_init__(self):
        for mon in self.monomials:
            if mon.indices and mon.indices[-1] > self.mode_count:
                raise ValidationError(
                    f"monomial {mon.indices} exceeds mode count {self.mode_count}")

    @property
    def n(self) -> int:
        return len(self.monomials)

    @property
    def qubit_count(self) -> int:
        return (self.mode_count + 1) // 2

    @property
    def dimension(self) -> int:
        return 1 << self.qubit_count

    def matrices(self) -> list[np.ndarray]:
        if self.dimension > DIM_CAP:
            raise CapExceeded(f"dimension {self.dimension} exceeds cap {DIM_CAP}")
        return [monomial_matrix(mon, self.qubit_count) for mon in self.monomials]


# ---------------------------------------------------------------------------
# Pauli bitmask algebra (internal)


def _pauli_mul(p1, p2):
    """(phase, xmask, zmask) product; phase counts powers of i."""
    ph1, x1, z1 = p1
    ph2, x2, z2 = p2
    ph = (ph1 + ph2 + 2 * (z1 & x2).bit_count()) % 4
    return ph, x1 ^ x2, z1 ^ z2


def _gamma_pauli(idx: int):
    """Jordan-Wigner image of Gamma_idx (1-based) as a phase/x/z triple."""
    j = (idx + 1) // 2  # qubit, 1-based
    if idx % 2:  # Gamma_{2j-1} = Z...Z X_j
        return 0, 1 << (j - 1), (1 << (j - 1)) - 1
    return 1, 1 << (j - 1), (1 << j) - 1  # Gamma_{2j} = Z...Z Y_j


def _monomial_pauli(mon: MajoranaMonomial):
    acc = (mon.phase_exponent, 0, 0)
    for idx in mon.indices:
        acc = _pauli_mul(acc, _gamma_pauli(idx))
    return acc


def _pauli_matrix(pauli, qubits: int) -> np.ndarray:
    """Dense matrix of i^ph X^x Z^z; one nonzero per column."""
    ph, x, z = pauli
    dim = 1 << qubits
    cols = np.arange(dim)
    rows = cols ^ x
    par = np.zeros(dim, dtype=np.int64)
    t = cols & z
    while t.any():
        par ^= t & 1
        t >>= 1
    mat = np.zeros((dim, dim), dtype=complex)
    mat[rows, cols] = (1j ** ph) * (1.0 - 2.0 * par)
    return mat


def monomial_matrix(mon: MajoranaMonomial, qubits: int | None = None) -> np.ndarray:
    if qubits is None:
        qubits = (max(mon.indices) + 1) // 2 if mon.indices else 0
    if max(mon.indices, default=0) > 2 * qubits:
        raise ValidationError("monomial does not fit the qubit count")
    if (1 << qubits) > DIM_CAP:
        raise CapExceeded(f"dimension {1 << qubits} exceeds cap {DIM_CAP}")
    return _pauli_matrix(_monomial_pauli(mon), qubits)


# ---------------------------------------------------------------------------
# realizations


def _relations_graph(obs: ObservableSet) -> graphs.Graph:
    """Anti-commutation pattern as a graph; tolerates repeated monomials."""
    edges = [(i, j) for i in range(obs.n) for j in range(i + 1, obs.n)
             if anticommutes(obs.monomials[i], obs.monomials[j])]
    return graphs.new_graph(obs.n, edges)


def anticommutativity_graph(obs: ObservableSet) -> graphs.Graph:
    """Graph with an edge where monomials anti-commute.

    Repeated index sets are rejected: the vertices of the graph must be
    distinguishable observables.
    """
    seen = set()
    for mon in obs.monomials:
        if mon.indices in seen:
            raise ValidationError(f"duplicate monomial {mon.indices}")
        seen.add(mon.indices)
    return _relations_graph(obs)


def realize_majorana(g: graphs.Graph) -> ObservableSet:
    """Edge-label realization: vertex v gets the labels of its incident
    edges, plus a fresh auxiliary label when its degree is odd (a fresh
    pair when the degree is zero, to keep the monomials distinct)."""
    incident = [[] for _ in range(g.n)]
    for label, (u, v) in enumerate(g.edges, start=1):
        incident[u].append(label)
        incident[v].append(label)
    nxt = g.m + 1
    for v in range(g.n):
        d = len(incident[v])
        if d % 2 == 1:
            incident[v].append(nxt)
            nxt += 1
        elif d == 0:
            incident[v] += [nxt, nxt + 1]
            nxt += 2
    obs = ObservableSet(tuple(monomial(ix) for ix in incident), nxt - 1)
    if _relations_graph(obs).edges != g.edges:
        raise InternalInconsistency("edge-label realization mismatch")
    return obs


def degree_k_family(n_modes: int, k: int, count_cap: int = 20000) -> ObservableSet:
    """All degree-k monomials on n_modes modes, in colex order."""
    if n_modes < 2 or n_modes % 2:
        raise ValidationError("n_modes must be a positive even integer")
    if not 1 <= k <= n_modes:
        raise ValidationError(f"k={k} out of range for {n_modes} modes")
    if comb(n_modes, k) > count_cap:
        raise CapExceeded(f"C({n_modes},{k}) exceeds cap {count_cap}")
    subsets = sorted(combinations(range(1, n_modes + 1), k),
                     key=lambda c: tuple(reversed(c)))
    return ObservableSet(tuple(monomial(s) for s in subsets), n_modes)


def _beta(g: graphs.Graph, x: int, y: int) -> int:
    """Alternating form x^T B y over F2 for vertex-set bitmasks x, y."""
    acc = 0
    while x:
        v = (x & -x).bit_length() - 1
        x &= x - 1
        acc ^= g.adjacency[v]
    return (acc & y).bit_count() & 1


def realize_minimal(g: graphs.Graph, rank_cap: int = 24) -> ObservableSet:
    """Minimal-dimension realization on rank(B)/2 qubits.

    A symplectic Gram-Schmidt run over F2 splits the vertex space into
    hyperbolic pairs; the residual coordinates of each vertex against those
    pairs give its Pauli X/Z masks, which are then translated back into a
    Majorana monomial.  Non-adjacent vertices with equal neighborhoods
    necessarily map to the same monomial.
    """
    r = graphs.f2_rank(g)
    if r > rank_cap:
        raise CapExceeded(f"F2 rank {r} exceeds cap {rank_cap}")
    work = [1 << v for v in range(g.n)]
    pairs = []
    while True:
        found = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                if _beta(g, work[i], work[j]):
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i, j = found
        a, b = work[i], work[j]
        pairs.append((a, b))
        rest = []
        for t in range(len(work)):
            if t in (i, j):
                continue
            x = work[t]
            if _beta(g, x, b):
                x ^= a
            if _beta(g, x, a):
                x ^= b
            rest.append(x)
        work = rest
    if 2 * len(pairs) != r:
        raise InternalInconsistency("hyperbolic pair count does not match rank")

    qubits = len(pairs)
    mons = []
    for v in range(g.n):
        ev = 1 << v
        xmask = zmask = 0
        for t, (a, b) in enumerate(pairs):
            if _beta(g, ev, b):
                xmask |= 1 << t
            if _beta(g, ev, a):
                zmask |= 1 << t
        mons.append(monomial(_pauli_to_indices(xmask, zmask, qubits)))
    obs = ObservableSet(tuple(mons), 2 * qubits)
    if _relations_graph(obs).edges != g.edges:
        raise InternalInconsistency("minimal realization mismatch")
    return obs


def _pauli_to_indices(xmask: int, zmask: int, qubits: int) -> tuple[int, ...]:
    """Invert the Jordan-Wigner mask map: find I with Pauli masks (x, z).

    Walking qubits from the top, the suffix parity s tracks how many chosen
    Majorana indices live strictly above mode 2j; per qubit the occupation
    bits are n2 = z_j xor s and n1 = x_j xor n2.
    """
    out = []
    s = 0
    for j in range(qubits, 0, -1):
        xj = (xmask >> (j - 1)) & 1
        zj = (zmask >> (j - 1)) & 1
        n2 = zj ^ s
        n1 = xj ^ n2
        if n2:
            out.append(2 * j)
        if n1:
            out.append(2 * j - 1)
        s ^= n1 ^ n2
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# serialization


def to_json_dict(obs: ObservableSet) -> dict:
    return {
        "modes": obs.mode_count,
        "monomials": [
            {"indices": list(m.indices), "alpha": m.phase_exponent}
            for m in obs.monomials
        ],
    }


def from_json_dict(d: dict) -> ObservableSet:
    if "modes" not in d or "monomials" not in d:
        raise ValidationError("observable JSON needs 'modes' and 'monomials'")
    mons = tuple(
        MajoranaMonomial(tuple(m["indices"]), m.get("alpha", (len(m["indices"]) // 2) % 4))
        for m in d["monomials"]
    )
    return ObservableSet(mons, d["modes"])


def to_json(obs: ObservableSet) -> str:
    return json.dumps(to_json_dict(obs), sort_keys=True)


def from_json(text: str) -> ObservableSet:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad observable JSON: {exc}") from exc
    return from_json_dict(d)
