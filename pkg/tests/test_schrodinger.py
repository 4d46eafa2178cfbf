"""Representations, coefficients, orthogonality, restriction, decay."""

import numpy as np
import pytest

from stepsq.harness import build_harness, element, identity, inverse, multiply, random_element
from stepsq.schrodinger import (
    CoefficientField,
    build_layer_rep,
    check_invariants,
    coefficient,
    coefficient_norm_sq,
    inverse_center_transform,
    partial_center_transform,
    restrict_and_renormalize,
    schwartz_decay_report,
    stepwise_rep,
)
from stepsq.states import GaussianState, Grid, GridState

STEPWISE_CASES = [
    ("HEIS1", {1: 1.0}), ("HEIS2", {1: 1.0}), ("HEIS3", {1: -0.8}),
    ("A3", {1: 1.0, 2: 1.0}), ("C2", {1: 0.7, 2: 1.3}),
    ("B2", {1: -0.4, 2: 0.9}), ("A1", {1: 1.5}),
]


def scalar_state(value: complex) -> GaussianState:
    """A zero-dimensional Gaussian state holding a single complex amplitude."""
    return GaussianState(np.zeros((0, 0), complex), np.zeros(0, complex),
                         complex(np.log(complex(value))))


# ---------- representation structure ----------

def test_layer_rep_action_structure():
    rep = build_layer_rep("HEIS1", 1.0)
    h = rep.harness
    g = GaussianState.ground(1)
    y = np.linspace(-1, 1, 5).reshape(-1, 1)
    # a-direction: modulation
    ga = element(h, [(0.0, [0.6], [0.0])])
    out = rep.apply(ga, g)
    assert np.allclose(out.evaluate(y), g.evaluate(y) * np.exp(-2j * np.pi * 0.6 * y[:, 0]))
    # b-direction: translation
    gb = element(h, [(0.0, [0.0], [0.8])])
    assert np.allclose(rep.apply(gb, g).evaluate(y), g.evaluate(y + 0.8))
    # center: scalar
    gz = element(h, [(0.4, [0.0], [0.0])])
    assert np.allclose(rep.apply(gz, g).evaluate(y),
                       np.exp(2j * np.pi * 0.4) * g.evaluate(y))


def test_center_scalar_scales_with_lambda():
    rep = build_layer_rep("HEIS1", 2.0)
    g = GaussianState.ground(1)
    gz = element(rep.harness, [(0.3, [0.0], [0.0])])
    y = np.array([[0.2]])
    assert np.allclose(rep.apply(gz, g).evaluate(y),
                       np.exp(4j * np.pi * 0.3) * g.evaluate(y))


def test_identity_acts_trivially():
    for name, gamma in STEPWISE_CASES:
        rep = stepwise_rep(name, gamma)
        v = GaussianState.packet(rep.D, [0.1] * rep.D, [0.2] * rep.D)
        out = rep.apply(identity(rep.harness), v)
        assert np.allclose(out.M, v.M) and np.allclose(out.ell, v.ell)
        assert abs(np.exp(out.k - v.k) - 1.0) < 1e-12


def test_layer_rep_errors():
    with pytest.raises(ValueError):
        build_layer_rep("HEIS1", 0.0)
    with pytest.raises(ValueError):
        build_layer_rep("A1", 1.0)  # no symplectic part


def test_stepwise_rep_errors():
    with pytest.raises(ValueError):
        stepwise_rep("A3", {1: 1.0, 2: 0.0})
    with pytest.raises(ValueError):
        stepwise_rep("A3", {1: 1.0})
    with pytest.raises(ValueError):
        stepwise_rep("A3", {1: 1.0, 2: 1.0}, backend="grid",
                     grid=Grid(2, 32, 3.0))


@pytest.mark.parametrize("name,gamma", STEPWISE_CASES)
def test_invariants_closed_50_pairs(name, gamma):
    rep = stepwise_rep(name, gamma)
    checks = check_invariants(rep, np.random.default_rng(42), trials=50)
    assert checks["unitarity"] <= 1e-8
    assert checks["homomorphism"] <= 1e-8


@pytest.mark.parametrize("d", [1, 2])
def test_invariants_grid_50_pairs(d):
    rep = stepwise_rep(f"HEIS{d}", {1: 1.0}, backend="grid",
                       grid=Grid(d, 64, 3.3))
    checks = check_invariants(rep, np.random.default_rng(43), trials=50)
    assert checks["unitarity"] <= 1e-4
    assert checks["homomorphism"] <= 1e-4


def test_stepwise_restricted_to_top_layer_matches_layer_rep():
    rep = stepwise_rep("A3", {1: 0.9, 2: 1.4})
    layer_rep = build_layer_rep("A3", 1.4)
    v = GaussianState.packet(2, [0.2, -0.3], [0.1, 0.5])
    g_top = element(layer_rep.harness, [(0.3, [0.5, -0.2], [0.4, 0.1])])
    g_full = element(rep.harness, [(0.0, [], []), (0.3, [0.5, -0.2], [0.4, 0.1])])
    a = rep.apply(g_full, v)
    b = layer_rep.apply(g_top, v)
    assert np.allclose(a.M, b.M) and np.allclose(a.ell, b.ell)
    assert abs(np.exp(a.k - b.k) - 1.0) < 1e-12


# ---------- coefficients ----------

def test_coefficient_at_identity_and_bound():
    rep = stepwise_rep("HEIS2", {1: 1.0})
    u = GaussianState.packet(2, [0.3, 0.0], [0.2, -0.1])
    v = GaussianState.ground(2)
    assert abs(coefficient(rep, u, v, identity(rep.harness)) - u.inner(v)) < 1e-12
    field = CoefficientField(rep, u, v)
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = random_element(rep.harness, rng, 2.0)
        assert abs(field.at(g)) <= field.bound() + 1e-12


def test_heisenberg_ground_coefficient_closed_form():
    # independent closed form: f(zeta, p, q) =
    #   exp(2 pi i lam zeta + pi i lam p q - pi (q^2 + lam^2 p^2) / 2)
    lam = 1.0
    rep = stepwise_rep("HEIS1", {1: lam})
    g0 = GaussianState.ground(1)
    rng = np.random.default_rng(6)
    for _ in range(100):
        zeta, p, q = rng.uniform(-2, 2, 3)
        g = element(rep.harness, [(zeta, [p], [q])])
        expected = np.exp(2j * np.pi * lam * zeta + 1j * np.pi * lam * p * q
                          - 0.5 * np.pi * (q * q + lam * lam * p * p))
        assert abs(coefficient(rep, g0, g0, g) - expected) < 1e-8


def test_translation_commutation_property():
    # l(x) r(y) f_{u,v} = f_{pi(x)u, pi(y)v}
    rep = stepwise_rep("C2", {1: 0.5, 2: 1.1})
    rng = np.random.default_rng(7)
    u = GaussianState.ground(1)
    v = GaussianState.packet(1, [0.2], [0.4])
    for _ in range(5):
        gx, gy, g = (random_element(rep.harness, rng) for _ in range(3))
        moved = multiply(multiply(inverse(gx), g), gy)
        lhs = coefficient(rep, u, v, moved)
        rhs = coefficient(rep, rep.apply(gx, u), rep.apply(gy, v), g)
        assert abs(lhs - rhs) < 1e-10


def test_coefficient_modulus_constant_on_central_cosets():
    rep = stepwise_rep("HEIS2", {1: 1.2})
    u = GaussianState.ground(2)
    v = GaussianState.packet(2, [0.1, 0.3], [0.0, 0.2])
    rng = np.random.default_rng(8)
    for _ in range(10):
        g = random_element(rep.harness, rng)
        s = element(rep.harness, [(float(rng.uniform(-3, 3)), np.zeros(2), np.zeros(2))])
        assert abs(abs(coefficient(rep, u, v, multiply(g, s)))
                   - abs(coefficient(rep, u, v, g))) < 1e-12


# ---------- orthogonality ----------

@pytest.mark.parametrize("d", [1, 2, 3])
def test_orthogonality_closed_heisenberg(d):
    for lam in (1.0, 2.0, -0.5, 1.7, 0.3):
        rep = stepwise_rep(f"HEIS{d}", {1: lam}, validate=False)
        u = GaussianState.ground(d)
        v = GaussianState.packet(d, [0.2] * d, [0.3] * d, 1.1)
        report = coefficient_norm_sq(rep, u, v)
        assert report.rel_error < 1e-6
        assert abs(report.value * rep.pf_abs / (u.norm_sq() * v.norm_sq()) - 1.0) < 1e-6


def test_orthogonality_closed_heisenberg_known_values():
    u = GaussianState.ground(1)
    assert abs(coefficient_norm_sq(stepwise_rep("HEIS1", {1: 1.0}), u, u).value - 1.0) < 1e-12
    assert abs(coefficient_norm_sq(stepwise_rep("HEIS1", {1: 2.0}), u, u).value - 0.5) < 1e-12


@pytest.mark.parametrize("name,gammas", [
    ("A3", [{1: 1.0, 2: 1.0}, {1: 0.3, 2: -1.2}, {1: -2.0, 2: 0.7},
            {1: 1.5, 2: 2.0}, {1: 0.0, 2: 0.9}]),
    ("C2", [{1: 1.0, 2: 1.0}, {1: 0.4, 2: -0.8}, {1: -1.1, 2: 1.6},
            {1: 2.0, 2: 0.5}, {1: 0.6, 2: -1.4}]),
    ("B2", [{1: 1.0, 2: 1.0}, {1: -0.7, 2: 0.9}, {1: 1.3, 2: -1.5},
            {1: 0.2, 2: 2.0}, {1: -1.8, 2: 0.6}]),
])
def test_orthogonality_stepwise(name, gammas):
    for gamma in gammas:
        rep = stepwise_rep(name, gamma, validate=False)
        u = GaussianState.ground(rep.D)
        v = GaussianState.packet(rep.D, [0.1] * rep.D, [-0.2] * rep.D, 0.9)
        report = coefficient_norm_sq(rep, u, v)
        assert abs(report.value * rep.pf_abs / (u.norm_sq() * v.norm_sq()) - 1.0) < 1e-3


@pytest.mark.parametrize("d,points", [(1, 256), (2, 64), (3, 24)])
def test_orthogonality_grid(d, points):
    grid = Grid(d, points, 3.3)
    for lam in (1.0, 2.0, 0.5, -1.0, 1.5):
        rep = stepwise_rep(f"HEIS{d}", {1: lam}, backend="grid", grid=grid,
                           validate=False)
        u = GridState.from_gaussian(GaussianState.ground(d), grid)
        report = coefficient_norm_sq(rep, u, u)
        assert report.rel_error < 1e-3, (d, lam, report.rel_error)


def test_coefficient_norm_rejects_character_reps():
    rep = stepwise_rep("A1", {1: 1.0})
    s = scalar_state(1.0)
    with pytest.raises(ValueError):
        coefficient_norm_sq(rep, s, s)


# ---------- restriction / renormalization ----------

def test_restriction_a1_in_a3():
    lam1, lam2 = 0.8, 1.5
    rep_big = stepwise_rep("A3", {1: lam1, 2: lam2})
    rep_small = stepwise_rep("A1", {1: lam1})
    u, v = scalar_state(0.9), scalar_state(np.exp(0.4j))
    e = GaussianState.ground(2)
    report, factor = restrict_and_renormalize(rep_big, rep_small, u, v, e)
    assert report.pointwise_abs_err < 1e-8
    assert abs(report.inner_xy - 1.0) < 1e-12
    assert report.norm_ratio_rel_err < 1e-3
    assert abs(factor - 1.0 / abs(lam2)) < 1e-12
    # the drift along the central direction is real and reported, not hidden
    assert report.central_deviation > 1e-3


def test_restriction_general_x_y():
    rep_big = stepwise_rep("A3", {1: 0.5, 2: 2.0})
    rep_small = stepwise_rep("A1", {1: 0.5})
    u, v = scalar_state(1.0), scalar_state(0.7)
    x = GaussianState.packet(2, [0.3, 0.1], [0.2, -0.4])
    y = GaussianState.ground(2)
    report, factor = restrict_and_renormalize(rep_big, rep_small, u, v, x, y)
    # slice value equals <x, y> times the small coefficient
    assert report.pointwise_abs_err < 1e-10
    assert report.norm_ratio_rel_err < 1e-3
    assert abs(factor - 0.5) < 1e-12  # sqrt(1 / lam2^2) = 1/2


def test_restriction_factor_transitivity_on_values():
    # |P1/P3|^(1/2) = |P1/P2|^(1/2) * |P2/P3|^(1/2) for the same harness pair
    rep_a = stepwise_rep("A1", {1: 0.3})
    for lam2a, lam2b in [(1.5, 3.0), (0.5, 2.0)]:
        big_a = stepwise_rep("A3", {1: 0.3, 2: lam2a})
        big_b = stepwise_rep("A3", {1: 0.3, 2: lam2b})
        s = scalar_state(1.0)
        e = GaussianState.ground(2)
        _, fa = restrict_and_renormalize(big_a, rep_a, s, s, e)
        _, fb = restrict_and_renormalize(big_b, rep_a, s, s, e)
        assert abs(fa / fb - lam2b / lam2a) < 1e-12


def test_restriction_incompatible_gamma():
    rep_big = stepwise_rep("A3", {1: 0.8, 2: 1.5})
    rep_small = stepwise_rep("A1", {1: 0.9})
    s = scalar_state(1.0)
    with pytest.raises(ValueError):
        restrict_and_renormalize(rep_big, rep_small, s, s, GaussianState.ground(2))


# ---------- partial center transform ----------

def test_center_transform_gaussian_oracle():
    ns, hs = 64, 0.15
    s = hs * (np.arange(ns) - ns // 2)
    x = np.linspace(-2, 2, 9)
    f = np.exp(-np.pi * (x[:, None] ** 2 + s[None, :] ** 2))
    out = partial_center_transform(f, hs, 1.0)
    assert np.abs(out - np.exp(-np.pi * x ** 2) * np.exp(-np.pi)).max() < 1e-12


def test_center_transform_zero_frequency_is_integral():
    ns, hs = 64, 0.15
    s = hs * (np.arange(ns) - ns // 2)
    f = np.exp(-np.pi * s ** 2)[None, :]
    assert abs(partial_center_transform(f, hs, 0.0)[0] - 1.0) < 1e-12


def test_center_transform_round_trip():
    ns, hs = 64, 0.15
    s = hs * (np.arange(ns) - ns // 2)
    x = np.linspace(-2, 2, 9)
    f = np.exp(-np.pi * (x[:, None] ** 2 + s[None, :] ** 2)) * (1 + 0.3j)
    gammas = np.fft.fftfreq(ns, hs)
    slices = np.stack([partial_center_transform(f, hs, float(g)) for g in gammas],
                      axis=-1)
    rec = inverse_center_transform(slices, gammas, hs, ns)
    assert np.abs(rec - f).max() < 1e-6


def test_center_transform_equivariance_under_shift():
    # shifting the central coordinate multiplies the transform by a phase
    ns, hs = 64, 0.15
    s = hs * (np.arange(ns) - ns // 2)
    f = np.exp(-np.pi * s ** 2)[None, :]
    shifted = np.exp(-np.pi * (s - hs * 3) ** 2)[None, :]
    g = 0.7
    lhs = partial_center_transform(shifted, hs, g)
    rhs = np.exp(2j * np.pi * g * hs * 3) * partial_center_transform(f, hs, g)
    assert np.abs(lhs - rhs).max() < 1e-9


def test_center_transform_nyquist_error():
    with pytest.raises(ValueError):
        partial_center_transform(np.zeros((3, 16)), 0.5, 2.0)


# ---------- Schwartz decay ----------

def heisenberg_field(lam=1.0):
    rep = stepwise_rep("HEIS1", {1: lam}, validate=False)
    u = GaussianState.ground(1)
    field = CoefficientField(rep, u, u)

    def fn(mesh):
        flat = mesh.reshape(-1, 2)
        vals = [field.at_pq(pt[:1], pt[1:]) for pt in flat]
        return np.array(vals).reshape(mesh.shape[:-1])

    return fn


def test_schwartz_decay_gaussian_states():
    report = schwartz_decay_report(heisenberg_field(), 2, k_max=3)
    assert report.passed
    assert report.sup_stable
    assert report.l1_cauchy_gap < 1e-6
    # weighted sups bounded and stable across the two largest boxes for all k
    for k, sups in report.sups.items():
        assert sups[-1] <= sups[-2] * (1 + 1e-6) + 1e-6


def test_schwartz_negative_control():
    report = schwartz_decay_report(lambda m: np.ones(m.shape[:-1]), 2, k_max=2)
    assert not report.passed
    assert not report.sup_stable


def test_decay_report_json():
    report = schwartz_decay_report(heisenberg_field(), 2, k_max=1)
    doc = report.to_json()
    assert doc["passed"] and "1" in doc["sups"]
