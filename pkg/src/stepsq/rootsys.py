"""Classical restricted root systems with exact rational coordinates.

Roots are tuples of Fractions in the orthonormal ambient basis e1..eN.
Simple roots carry the center-out (type A) or multiple-bond-end-first
(types B, C, D) index scheme used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Dict, Iterable, List, Sequence, Tuple

from .jsonio import rat_str, vec_strs

Vector = Tuple[Q, ...]

SERIES = ("A", "B", "C", "D")

_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 2}


def inner(a: Sequence[Q], b: Sequence[Q]) -> Q:
    """Exact inner product of two ambient vectors."""
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return sum(x * y for x, y in zip(a, b))


def vadd(a: Vector, b: Vector) -> Vector:
    """Exact vector sum."""
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vector, b: Vector) -> Vector:
    """Exact vector difference."""
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Vector) -> Vector:
    """Exact vector negation."""
    return tuple(-x for x in a)


def vscale(c: Q, a: Vector) -> Vector:
    """Exact scalar multiple."""
    return tuple(c * x for x in a)


def _e(i: int, dim: int) -> Vector:
    """Standard basis vector e_i (1-based) in Q^dim."""
    return tuple(Q(1) if j == i - 1 else Q(0) for j in range(dim))


@dataclass(frozen=True)
class RootSystem:
    """A root system given by exact coordinate vectors.

    series is one of "A", "B", "C", "D", or "raw" for ingested root sets.
    simple_enumeration maps the signed index scheme to simple roots; it is
    empty for raw data.
    """

    series: str
    rank: int
    roots: frozenset
    positives: Tuple[Vector, ...]
    simple_enumeration: Dict[int, Vector] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        """Ambient coordinate dimension."""
        return len(next(iter(self.roots)))

    def simple_indices(self) -> List[int]:
        """Sorted indices of the simple-root enumeration."""
        return sorted(self.simple_enumeration)


def _positive_roots(series: str, rank: int) -> Tuple[List[Vector], int]:
    """Standard positive roots and the ambient dimension for a series."""
    if series == "A":
        dim = rank + 1
        pos = [vsub(_e(i, dim), _e(j, dim)) for i in range(1, dim + 1)
               for j in range(i + 1, dim + 1)]
        return pos, dim
    dim = rank
    pos: List[Vector] = []
    for i in range(1, rank + 1):
        for j in range(i + 1, rank + 1):
            pos.append(vsub(_e(i, dim), _e(j, dim)))
            pos.append(vadd(_e(i, dim), _e(j, dim)))
    if series == "B":
        pos.extend(_e(i, dim) for i in range(1, rank + 1))
    elif series == "C":
        pos.extend(vscale(Q(2), _e(i, dim)) for i in range(1, rank + 1))
    elif series != "D":
        raise ValueError(f"unsupported series {series!r}")
    return pos, dim


def _simple_enumeration(series: str, rank: int, dim: int) -> Dict[int, Vector]:
    """Signed-index simple roots: center-out for A, bond-end-first for B/C/D."""
    def alpha(i: int) -> Vector:
        return vsub(_e(i, dim), _e(i + 1, dim))

    simple: Dict[int, Vector] = {}
    if series == "A":
        if rank % 2 == 1:
            n = (rank - 1) // 2
            for k in range(-n, n + 1):
                simple[k] = alpha(n + 1 + k)
        else:
            n = rank // 2
            for k in range(1, n + 1):
                simple[-k] = alpha(n + 1 - k)
                simple[k] = alpha(n + k)
        return simple
    if series == "B":
        simple[1] = _e(rank, dim)
    elif series == "C":
        simple[1] = vscale(Q(2), _e(rank, dim))
    else:
        simple[1] = vsub(_e(rank - 1, dim), _e(rank, dim))
        simple[2] = vadd(_e(rank - 1, dim), _e(rank, dim))
    start = 3 if series == "D" else 2
    for j in range(start, rank + 1):
        simple[j] = alpha(rank - j + 1)
    return simple


def build_root_system(series: str, rank: int) -> RootSystem:
    """Build the standard root system of the given series and rank."""
    if series not in SERIES:
        raise ValueError(f"unsupported series {series!r}; expected one of {SERIES}")
    if rank < _MIN_RANK[series]:
        raise ValueError(
            f"rank {rank} below minimum {_MIN_RANK[series]} for series {series}"
        )
    pos, dim = _positive_roots(series, rank)
    pos_sorted = tuple(sorted(pos, reverse=True))
    roots = frozenset(pos_sorted) | frozenset(vneg(a) for a in pos_sorted)
    simple = _simple_enumeration(series, rank, dim)
    system = RootSystem(series, rank, roots, pos_sorted, simple)
    _check_invariants(system)
    return system


def raw_root_system(vectors: Iterable[Sequence[Q]]) -> RootSystem:
    """Ingest an explicit root set; only closure under negation is validated."""
    vs = frozenset(tuple(Q(x) for x in v) for v in vectors)
    if not vs:
        raise ValueError("empty root set")
    for v in vs:
        if all(x == 0 for x in v):
            raise ValueError("zero vector is not a root")
        if vneg(v) not in vs:
            raise ValueError(f"root set not closed under negation at {v}")
    pos = tuple(sorted((v for v in vs if v > vneg(v)), reverse=True))
    return RootSystem("raw", 0, vs, pos, {})


def _check_invariants(system: RootSystem) -> None:
    """Assert the structural invariants of a generated system."""
    pos = set(system.positives)
    neg = {vneg(a) for a in pos}
    assert pos.isdisjoint(neg) and pos | neg == set(system.roots)
    simples = list(system.simple_enumeration.values())
    for i, a in enumerate(simples):
        for b in simples[i + 1:]:
            assert inner(a, b) <= 0
    for a in pos:
        assert _is_nonneg_integer_combo(a, simples)


def _is_nonneg_integer_combo(target: Vector, simples: List[Vector]) -> bool:
    """Decide whether target is a nonnegative integer combination of simples."""
    coeffs = simple_coordinates(target, simples)
    if coeffs is None:
        return False
    return all(c.denominator == 1 and c >= 0 for c in coeffs)


def simple_coordinates(target: Vector, simples: List[Vector]):
    """Solve target = sum c_i * simples[i] exactly; None if unsolvable.

    Uses fraction-free Gaussian elimination on the (dim x k) system.
    """
    k = len(simples)
    dim = len(target)
    rows = [[simples[j][i] for j in range(k)] + [target[i]] for i in range(dim)]
    pivots = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, dim) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == dim:
            break
    for i in range(r, dim):
        if rows[i][k] != 0:
            return None
    coeffs = [Q(0)] * k
    for i, c in enumerate(pivots):
        coeffs[c] = rows[i][k]
    return coeffs


def is_root(system: RootSystem, v: Sequence[Q]) -> bool:
    """Membership test against the exact root set."""
    return tuple(Q(x) for x in v) in system.roots


def nonmultipliable(system: RootSystem) -> RootSystem:
    """Subsystem of roots a with 2a not a root; idempotent."""
    keep = frozenset(a for a in system.roots if vscale(Q(2), a) not in system.roots)
    pos = tuple(a for a in system.positives if a in keep)
    if not pos:
        pos = tuple(sorted((v for v in keep if v > vneg(v)), reverse=True))
    simple = {i: a for i, a in system.simple_enumeration.items() if a in keep}
    return RootSystem(system.series, system.rank, keep, pos, simple)


def strongly_orthogonal(system: RootSystem, a: Vector, b: Vector) -> bool:
    """True iff neither a+b nor a-b is a root (a == b gives False)."""
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    if a == b:
        return False
    so = vadd(a, b) not in system.roots and vsub(a, b) not in system.roots
    if so:
        assert inner(a, b) == 0, "strong orthogonality must imply orthogonality"
    return so


def cartan_matrix(system: RootSystem) -> List[List[Q]]:
    """Cartan matrix 2(ai,aj)/(aj,aj) over the sorted simple indices."""
    idx = system.simple_indices()
    simples = [system.simple_enumeration[i] for i in idx]
    return [[Q(2) * inner(a, b) / inner(b, b) for b in simples] for a in simples]


def to_json(system: RootSystem) -> dict:
    """Serialize to the interchange document with "p/q" rationals."""
    return {
        "series": system.series,
        "params": {"rank": system.rank},
        "simple": [
            {"index": i, "coords": vec_strs(system.simple_enumeration[i])}
            for i in system.simple_indices()
        ],
        "positives": [vec_strs(a) for a in system.positives],
    }
