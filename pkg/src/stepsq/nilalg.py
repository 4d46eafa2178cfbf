"""Rational matrix realizations of split nilradicals, layers, and setup axioms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

from .cascade import CascadeDecomposition
from .jsonio import rat_str
from .rootsys import RootSystem, Vector, build_root_system, inner, vadd

Matrix = Tuple[Tuple[Q, ...], ...]


def zeros(n: int, m: Optional[int] = None) -> Matrix:
    """Exact zero matrix."""
    m = n if m is None else m
    return tuple(tuple(Q(0) for _ in range(m)) for _ in range(n))


def eij(i: int, j: int, n: int) -> Matrix:
    """Elementary matrix E_ij (1-based) of size n."""
    return tuple(tuple(Q(1) if (r, c) == (i - 1, j - 1) else Q(0)
                       for c in range(n)) for r in range(n))


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix sum."""
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix difference."""
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: Q, a: Matrix) -> Matrix:
    """Exact scalar multiple."""
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix product."""
    if len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix commutator [a, b]."""
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def _entries(mat: Matrix) -> Tuple[Tuple[int, int, Q], ...]:
    """Sparse (row, col, value) triples of the nonzero entries."""
    return tuple((i, j, v) for i, row in enumerate(mat)
                 for j, v in enumerate(row) if v != 0)


def sparse_commutator(a: Matrix, b: Matrix) -> Dict[Tuple[int, int], Q]:
    """Commutator of sparse matrices as a position-to-value map."""
    out: Dict[Tuple[int, int], Q] = {}
    ea, eb = _entries(a), _entries(b)
    for i, j, v in ea:
        for k, l, w in eb:
            if j == k:
                out[(i, l)] = out.get((i, l), Q(0)) + v * w
            if l == i:
                out[(k, j)] = out.get((k, j), Q(0)) - v * w
    return {p: v for p, v in out.items() if v != 0}


def is_zero(a: Matrix) -> bool:
    """True iff every entry vanishes."""
    return all(x == 0 for row in a for x in row)


@dataclass(frozen=True)
class NilpotentAlgebra:
    """Nilradical graded by positive restricted roots, as exact matrices."""

    series: str
    rank: int
    system: RootSystem
    basis: Dict[Vector, Matrix]
    size: int

    @property
    def dimension(self) -> int:
        """Number of positive root spaces (all one-dimensional here)."""
        return len(self.basis)

    def cartan(self, t: Sequence[Q]) -> Matrix:
        """Diagonal Cartan element with split parameters t_1..t_rank."""
        t = [Q(x) for x in t]
        if len(t) != self.rank:
            raise ValueError("dimension mismatch")
        if self.series == "A":
            diag = t + [Q(0)] * (self.size - self.rank)
        elif self.series == "B":
            diag = t + [Q(0)] + [-x for x in reversed(t)]
        elif self.series == "D":
            diag = t + [-x for x in reversed(t)]
        else:
            diag = t + [-x for x in t]
        return tuple(tuple(diag[r] if r == c else Q(0) for c in range(self.size))
                     for r in range(self.size))

    def root_value(self, alpha: Vector, t: Sequence[Q]) -> Q:
        """alpha(h) for the Cartan element with parameters t."""
        tt = [Q(x) for x in t]
        if self.series == "A":
            tt = tt + [Q(0)] * (len(alpha) - len(tt))
        return inner(alpha, tuple(tt))


def bracket(alg: NilpotentAlgebra, x: Matrix, y: Matrix) -> Matrix:
    """Exact Lie bracket (matrix commutator) inside the algebra."""
    if len(x) != alg.size or len(y) != alg.size:
        raise ValueError("shape mismatch")
    return commutator(x, y)


def _build_basis(series: str, rank: int, system: RootSystem) -> Tuple[Dict[Vector, Matrix], int]:
    """Per-series elementary-matrix models of the positive root spaces."""
    basis: Dict[Vector, Matrix] = {}
    if series == "A":
        n = rank + 1
        for a in system.positives:
            i = next(k for k, x in enumerate(a) if x == 1) + 1
            j = next(k for k, x in enumerate(a) if x == -1) + 1
            basis[a] = eij(i, j, n)
        return basis, n
    if series == "C":
        k = rank
        n = 2 * k
        for a in system.positives:
            pos = [idx + 1 for idx, x in enumerate(a) if x > 0]
            neg = [idx + 1 for idx, x in enumerate(a) if x < 0]
            if neg:
                i, j = pos[0], neg[0]
                basis[a] = mat_sub(eij(i, j, n), eij(k + j, k + i, n))
            elif len(pos) == 2:
                i, j = pos
                basis[a] = mat_add(eij(i, k + j, n), eij(j, k + i, n))
            else:
                i = pos[0]
                basis[a] = eij(i, k + i, n)
        return basis, n
    if series in ("B", "D"):
        k = rank
        n = 2 * k + 1 if series == "B" else 2 * k

        def conj(i: int) -> int:
            return n + 1 - i

        for a in system.positives:
            pos = [idx + 1 for idx, x in enumerate(a) if x > 0]
            neg = [idx + 1 for idx, x in enumerate(a) if x < 0]
            if neg:
                i, j = pos[0], neg[0]
                basis[a] = mat_sub(eij(i, j, n), eij(conj(j), conj(i), n))
            elif len(pos) == 2:
                i, j = pos
                basis[a] = mat_sub(eij(i, conj(j), n), eij(j, conj(i), n))
            else:
                i = pos[0]
                basis[a] = mat_sub(eij(i, k + 1, n), eij(k + 1, conj(i), n))
        return basis, n
    raise ValueError(f"unsupported series {series!r}")


def realize_split_nilradical(series: str, rank: int, _validate: bool = True) -> NilpotentAlgebra:
    """Strictly-triangularizable rational model of the split nilradical."""
    system = build_root_system(series, rank)
    basis, size = _build_basis(series, rank, system)
    alg = NilpotentAlgebra(series, rank, system, basis, size)
    if _validate:
        _validate_algebra(alg)
    return alg


def _validate_algebra(alg: NilpotentAlgebra) -> None:
    """Assert the grading and closure invariants exactly."""
    for i in range(alg.rank):
        t = [Q(1) if j == i else Q(0) for j in range(alg.rank)]
        diag = [alg.cartan(t)[k][k] for k in range(alg.size)]
        for a, x in alg.basis.items():
            val = alg.root_value(a, t)
            for r, c, _ in _entries(x):
                assert diag[r] - diag[c] == val, f"grading fails at {a}"
    roots = set(alg.system.positives)
    items = list(alg.basis.items())
    for i, (a, x) in enumerate(items):
        for b, y in items[i:]:
            z = sparse_commutator(x, y)
            coeffs = _decompose_entries(alg, z)
            s = vadd(a, b)
            if s in roots:
                assert coeffs is not None and set(coeffs) <= {s}, \
                    f"bracket [{a},{b}] escapes"
            else:
                assert not z, f"bracket [{a},{b}] should vanish"


def _is_multiple(z: Matrix, w: Matrix) -> bool:
    """True iff z is an exact scalar multiple of w (including z = 0)."""
    c = None
    for rz, rw in zip(z, w):
        for x, y in zip(rz, rw):
            if y == 0:
                if x != 0:
                    return False
            else:
                ratio = x / y
                if c is None:
                    c = ratio
                elif ratio != c:
                    return False
    return True


def structure_constant(alg: NilpotentAlgebra, a: Vector, b: Vector) -> Q:
    """Coefficient c with [x_a, x_b] = c * x_{a+b} (0 when the sum is not a root)."""
    z = commutator(alg.basis[a], alg.basis[b])
    s = vadd(a, b)
    if s not in alg.basis:
        assert is_zero(z)
        return Q(0)
    w = alg.basis[s]
    for rz, rw in zip(z, w):
        for x, y in zip(rz, rw):
            if y != 0:
                assert z == mat_scale(x / y, w)
                return x / y
    assert is_zero(z)
    return Q(0)


@dataclass(frozen=True)
class Layer:
    """One layer: central root space plus the symplectic root spaces."""

    r: int
    beta: Vector
    z_basis: Tuple[Tuple[Vector, Matrix], ...]
    v_basis: Tuple[Tuple[Vector, Matrix], ...]

    @property
    def d_r(self) -> int:
        """Half the symplectic dimension."""
        return len(self.v_basis) // 2

    @property
    def dim(self) -> int:
        """Layer dimension."""
        return len(self.z_basis) + len(self.v_basis)


def layer_subalgebras(alg: NilpotentAlgebra, decomp: CascadeDecomposition,
                      validate: bool = True) -> List[Layer]:
    """Layers l_r = z_r + v_r, asserted two-step with bracket into z_r."""
    layers: List[Layer] = []
    for r in range(1, decomp.m + 1):
        beta = decomp.beta[r - 1]
        members = decomp.layers[r]
        layer = Layer(
            r=r,
            beta=beta,
            z_basis=((beta, alg.basis[beta]),),
            v_basis=tuple((a, alg.basis[a]) for a in members),
        )
        if validate:
            assert len(members) % 2 == 0
            for a, x in layer.v_basis:
                for b, y in layer.v_basis:
                    z = sparse_commutator(x, y)
                    coeffs = _decompose_entries(alg, z)
                    assert coeffs is not None and set(coeffs) <= {beta}, \
                        f"[v_{r}, v_{r}] escapes z_{r} at ({a},{b})"
                assert not sparse_commutator(alg.basis[beta], x), \
                    f"z_{r} must be central in l_{r}"
        layers.append(layer)
    return layers


_POSMAP_CACHE: Dict[int, Tuple[NilpotentAlgebra, dict, dict]] = {}


def _position_map(alg: NilpotentAlgebra):
    """Map each nonzero matrix position to its unique owning basis root.

    The split models place distinct roots at disjoint entry positions, which
    is asserted here; decomposition then reads coefficients off directly.
    Also returns the nonzero-entry count per basis root.
    """
    cached = _POSMAP_CACHE.get(id(alg))
    if cached is not None and cached[0] is alg:
        return cached[1], cached[2]
    posmap: Dict[Tuple[int, int], Tuple[Vector, Q]] = {}
    nnz: Dict[Vector, int] = {}
    for a, x in alg.basis.items():
        count = 0
        for i, row in enumerate(x):
            for j, val in enumerate(row):
                if val != 0:
                    assert (i, j) not in posmap, "basis positions must be disjoint"
                    posmap[(i, j)] = (a, val)
                    count += 1
        nnz[a] = count
    _POSMAP_CACHE[id(alg)] = (alg, posmap, nnz)
    return posmap, nnz


def _decompose_entries(alg: NilpotentAlgebra,
                       entries: Dict[Tuple[int, int], Q]) -> Optional[Dict[Vector, Q]]:
    """Coefficients of a sparse matrix in the root-space basis; None if outside."""
    posmap, nnz = _position_map(alg)
    coeffs: Dict[Vector, Q] = {}
    counts: Dict[Vector, int] = {}
    for pos, val in entries.items():
        if pos not in posmap:
            return None
        a, base = posmap[pos]
        c = val / base
        if a in coeffs and coeffs[a] != c:
            return None
        coeffs[a] = c
        counts[a] = counts.get(a, 0) + 1
    for a in coeffs:
        if counts[a] != nnz[a]:
            return None
    return coeffs


def decompose(alg: NilpotentAlgebra, mat: Matrix) -> Optional[Dict[Vector, Q]]:
    """Exact coefficients of mat in the root-space basis; None if outside."""
    return _decompose_entries(alg, {(i, j): v for i, j, v in _entries(mat)})


def span_contains(alg: NilpotentAlgebra, allowed: Sequence[Vector], target: Matrix) -> bool:
    """Exact membership of target in the span of the allowed root spaces."""
    coeffs = decompose(alg, target)
    return coeffs is not None and set(coeffs) <= set(allowed)


def bracket_support_table(alg: NilpotentAlgebra) -> Dict[Tuple[Vector, Vector], Optional[frozenset]]:
    """Root support of [x_a, x_b] for every unordered basis pair, or None.

    None marks a bracket escaping the basis span (cannot happen for a valid
    realization but can for corrupted fixtures).
    """
    roots = sorted(alg.basis, reverse=True)
    table: Dict[Tuple[Vector, Vector], Optional[frozenset]] = {}
    for i, a in enumerate(roots):
        for b in roots[i:]:
            ent = sparse_commutator(alg.basis[a], alg.basis[b])
            coeffs = _decompose_entries(alg, ent)
            supp = None if coeffs is None else frozenset(coeffs)
            table[(a, b)] = supp
            table[(b, a)] = supp
    return table


@dataclass(frozen=True)
class AxiomReport:
    """Per-instance booleans for the three layer-structure axioms."""

    rows: Tuple[dict, ...]

    @property
    def passed(self) -> bool:
        """True iff every axiom instance holds."""
        return all(row["ok"] for row in self.rows)

    def to_json(self) -> dict:
        """Serialize the report."""
        return {"rows": list(self.rows), "passed": self.passed}


def verify_setup_axioms(alg: NilpotentAlgebra, layers: Sequence[Layer]) -> AxiomReport:
    """Exact verification of the stepwise-decomposition axioms.

    (i)  [l_r, z_s] = 0 for r < s;
    (ii) [l_r, l_s] lies in the symplectic part v_s for r < s;
    (iii) each tail l_{r+1} + ... + l_m is an ideal of the full algebra.
    """
    rows: List[dict] = []
    m = len(layers)
    table = bracket_support_table(alg)

    def supp_ok(a: Vector, b: Vector, allowed: frozenset) -> bool:
        supp = table[(a, b)]
        return supp is not None and supp <= allowed

    def layer_roots(layer: Layer) -> List[Vector]:
        return [a for a, _ in layer.z_basis + layer.v_basis]

    empty = frozenset()
    for r in range(m):
        for s in range(r + 1, m):
            ok = all(supp_ok(x, z, empty)
                     for x in layer_roots(layers[r])
                     for z, _ in layers[s].z_basis)
            rows.append({"axiom": "commute_with_later_centers",
                         "r": r + 1, "s": s + 1, "ok": ok})
            v_s = frozenset(a for a, _ in layers[s].v_basis)
            ok2 = all(supp_ok(x, y, v_s)
                      for x in layer_roots(layers[r])
                      for y in layer_roots(layers[s]))
            rows.append({"axiom": "bracket_into_later_symplectic_part",
                         "r": r + 1, "s": s + 1, "ok": ok2})
    all_roots = [a for layer in layers for a in layer_roots(layer)]
    for r in range(m - 1):
        tail = frozenset(a for layer in layers[r + 1:] for a in layer_roots(layer))
        ok = all(supp_ok(x, y, tail) for x in all_roots for y in tail)
        rows.append({"axiom": "tail_is_ideal", "r": r + 2, "s": m, "ok": ok})
    return AxiomReport(tuple(rows))


def corrupted_fixture() -> Tuple[NilpotentAlgebra, CascadeDecomposition]:
    """Negative control: two basis matrices swapped across a bridge root.

    The matrix of the first-layer root and of a second-layer root trade
    places, so the tail ideal axiom must fail.
    """
    from .cascade import cascade_decomposition

    alg = realize_split_nilradical("A", 3)
    decomp = cascade_decomposition(alg.system)
    beta1 = decomp.beta[0]
    other = decomp.layers[2][0]
    basis = dict(alg.basis)
    basis[beta1], basis[other] = basis[other], basis[beta1]
    bad = NilpotentAlgebra(alg.series, alg.rank, alg.system, basis, alg.size)
    return bad, decomp


def to_json(alg: NilpotentAlgebra) -> dict:
    """Serialize basis matrices row-major with rational strings."""
    return {
        "series": alg.series,
        "params": {"rank": alg.rank},
        "basis": [
            {"root": [rat_str(x) for x in a],
             "matrix": [rat_str(x) for row in alg.basis[a] for x in row]}
            for a in sorted(alg.basis, reverse=True)
        ],
    }
