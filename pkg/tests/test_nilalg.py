"""Matrix-model nilradicals: grading, brackets, layers, and setup axioms."""

import random
from fractions import Fraction as Q

import pytest

from stepsq.cascade import cascade_decomposition
from stepsq.nilalg import (
    bracket,
    commutator,
    corrupted_fixture,
    decompose,
    is_zero,
    layer_subalgebras,
    mat_add,
    mat_scale,
    realize_split_nilradical,
    structure_constant,
    verify_setup_axioms,
    zeros,
)


def V(*xs):
    return tuple(Q(x) for x in xs)


def test_dimensions():
    assert realize_split_nilradical("A", 2).dimension == 3
    assert realize_split_nilradical("A", 3).dimension == 6
    assert realize_split_nilradical("C", 2).dimension == 4
    assert realize_split_nilradical("B", 3).dimension == 9
    assert realize_split_nilradical("D", 4).dimension == 12


def test_strictly_triangular_a():
    alg = realize_split_nilradical("A", 3)
    for x in alg.basis.values():
        for i in range(alg.size):
            for j in range(i + 1):
                assert x[i][j] == 0


def test_bracket_examples():
    alg = realize_split_nilradical("A", 3)
    c = structure_constant(alg, V(1, -1, 0, 0), V(0, 1, 0, -1))
    assert c in (Q(1), Q(-1))
    x = alg.basis[V(1, -1, 0, 0)]
    assert is_zero(bracket(alg, x, x))


def test_grading_random_cartan():
    rng = random.Random(3)
    for series, rank in (("A", 3), ("B", 3), ("C", 3), ("D", 4)):
        alg = realize_split_nilradical(series, rank)
        t = [Q(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(rank)]
        h = alg.cartan(t)
        for a, x in alg.basis.items():
            assert commutator(h, x) == mat_scale(alg.root_value(a, t), x)


def test_jacobi_random_triples():
    rng = random.Random(11)
    for series, rank in (("A", 4), ("B", 3), ("C", 3), ("D", 4)):
        alg = realize_split_nilradical(series, rank)
        mats = list(alg.basis.values())
        for _ in range(100):
            def rand_elem():
                out = zeros(alg.size)
                for m in rng.sample(mats, k=3):
                    out = mat_add(out, mat_scale(Q(rng.randint(-3, 3)), m))
                return out
            x, y, z = rand_elem(), rand_elem(), rand_elem()
            jac = mat_add(mat_add(commutator(x, commutator(y, z)),
                                  commutator(y, commutator(z, x))),
                          commutator(z, commutator(x, y)))
            assert is_zero(jac)


def test_layer_dims():
    alg = realize_split_nilradical("A", 3)
    layers = layer_subalgebras(alg, cascade_decomposition(alg.system))
    assert layers[0].dim == 1 and layers[0].d_r == 0
    assert layers[1].dim == 5 and layers[1].d_r == 2
    for series in ("C", "B"):
        alg = realize_split_nilradical(series, 2)
        layers = layer_subalgebras(alg, cascade_decomposition(alg.system))
        assert layers[1].dim == 3 and layers[1].d_r == 1


def test_decompose_roundtrip():
    alg = realize_split_nilradical("B", 3)
    roots = sorted(alg.basis, reverse=True)
    target = mat_add(mat_scale(Q(2, 3), alg.basis[roots[0]]),
                     mat_scale(Q(-5), alg.basis[roots[3]]))
    coeffs = decompose(alg, target)
    assert coeffs == {roots[0]: Q(2, 3), roots[3]: Q(-5)}
    from stepsq.nilalg import eij
    assert decompose(alg, eij(2, 1, alg.size)) is None


AXIOM_CASES = (
    [("A", r) for r in range(2, 8)]
    + [(s, r) for s in ("B", "C", "D") for r in range(2, 6) if not (s == "D" and r == 2)]
)


@pytest.mark.parametrize("series,rank", AXIOM_CASES)
def test_setup_axioms_pass(series, rank):
    alg = realize_split_nilradical(series, rank)
    decomp = cascade_decomposition(alg.system)
    layers = layer_subalgebras(alg, decomp)
    report = verify_setup_axioms(alg, layers)
    assert report.passed, [r for r in report.rows if not r["ok"]]


def test_corrupted_negative_control():
    bad, decomp = corrupted_fixture()
    layers = layer_subalgebras(bad, decomp, validate=False)
    report = verify_setup_axioms(bad, layers)
    assert not report.passed
    assert any(not r["ok"] for r in report.rows)


def test_symplectic_form_nondegenerate_on_layers():
    # the beta_r-coefficient pairing on v_r must pair each root with exactly
    # its sigma partner, nondegenerately
    for series, rank in (("A", 5), ("B", 4), ("C", 3), ("D", 4)):
        alg = realize_split_nilradical(series, rank)
        decomp = cascade_decomposition(alg.system)
        layers = layer_subalgebras(alg, decomp)
        for layer in layers:
            if layer.d_r == 0:
                continue
            roots = [a for a, _ in layer.v_basis]
            mat = [[0] * len(roots) for _ in roots]
            for i, a in enumerate(roots):
                for j, b in enumerate(roots):
                    z = commutator(layer.v_basis[i][1], layer.v_basis[j][1])
                    coeffs = decompose(alg, z)
                    mat[i][j] = coeffs.get(layer.beta, Q(0)) if coeffs else Q(0)
            for i, row in enumerate(mat):
                nz = [j for j, x in enumerate(row) if x != 0]
                assert len(nz) == 1, "each root pairs with exactly one partner"
                assert mat[nz[0]][i] == -row[nz[0]]


def test_shape_errors():
    a3 = realize_split_nilradical("A", 3)
    a2 = realize_split_nilradical("A", 2)
    with pytest.raises(ValueError):
        bracket(a3, next(iter(a2.basis.values())), next(iter(a3.basis.values())))
    with pytest.raises(ValueError):
        realize_split_nilradical("E", 6)
