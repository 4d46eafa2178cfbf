"""Schrödinger-model representations on layered harness groups.

Builds the induced-representation model on functions of the top layer's
b-coordinates, extends it to the earlier layers by the adjoint point
transformation, and provides coefficient functions with their orthogonality,
restriction/renormalization, central Fourier transform, and decay reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .harness import (
    GroupElement,
    Harness,
    adjoint_action_on_top,
    build_harness,
    expm_nilpotent,
    identity,
    random_element,
)
from .states import GaussianState, Grid, GridState, gaussian_integral

State = Union[GaussianState, GridState]


def _layer_harness(h: Harness) -> Harness:
    """Single-layer harness carrying only the top layer of h."""
    return Harness(name=f"{h.name}-top", size=h.size, layers=(h.top,))


@dataclass(frozen=True, eq=False)
class RepInstance:
    """Unitary representation realized on functions of the b-coordinates.

    The state space is L2 of R^D with D the half-dimension of the top layer
    (D = 0 gives the scalar character line).  Earlier layers act through the
    point transformation of b-coordinates induced by conjugation, with the
    phase dictated by the induced-representation model; correctness is
    enforced by the numerically checked homomorphism invariant.
    """

    harness: Harness
    gamma: Tuple[Tuple[int, float], ...]  # sorted (layer index, lambda_r)
    backend: str = "closed"  # "closed" (Gaussian states) or "grid"
    grid: Optional[Grid] = None

    @property
    def D(self) -> int:
        return self.harness.top.d

    @property
    def gamma_dict(self) -> Dict[int, float]:
        return dict(self.gamma)

    @property
    def lam(self) -> float:
        """Coefficient on the top layer's central direction."""
        return self.gamma_dict[self.harness.top.r]

    @property
    def pf_abs(self) -> float:
        """|Pf| of the top-layer pairing at lambda; empty product for D = 0."""
        top = self.harness.top
        if top.d == 0:
            return 1.0
        return abs(self.lam) ** top.d * abs(np.linalg.det(top.C))

    def _apply_top(self, zeta: float, p: np.ndarray, q: np.ndarray,
                   state: State) -> State:
        lam = self.lam
        top = self.harness.top
        out = state.translate(np.asarray(q, dtype=float)) if top.d else state
        freq = -lam * top.C.T @ np.asarray(p, dtype=float) if top.d else np.zeros(0)
        return out.modulate(freq, 2j * np.pi * lam * zeta)

    def _apply_earlier(self, layer_index: int, zeta: float, state: State) -> State:
        layer = self.harness.layers[layer_index]
        assert layer.d == 0, "earlier layers of the supported harnesses are lines"
        if self.backend != "closed":
            raise ValueError("the grid path supports single-layer harnesses only")
        lam = self.lam
        L = expm_nilpotent(zeta * layer.z)
        zvec, A, B = adjoint_action_on_top(self.harness, L)
        out = state.substitute(B)
        out = out.quadratic_phase(-np.pi * lam * (A.T @ self.harness.top.C @ B),
                                  2.0 * np.pi * lam * zvec, 0.0)
        lam_r = self.gamma_dict.get(layer.r, 0.0)
        return out.modulate(np.zeros(self.D), 2j * np.pi * lam_r * zeta)

    def apply(self, g: GroupElement, state: State) -> State:
        """pi(g) applied to a state vector."""
        assert len(g.coords) == self.harness.m, "element/representation mismatch"
        out = state
        for idx in range(self.harness.m - 1, -1, -1):
            zeta, p, q = g.coords[idx]
            if idx == self.harness.m - 1:
                out = self._apply_top(zeta, p, q, out)
            else:
                out = self._apply_earlier(idx, zeta, out)
        return out

    def random_state(self, rng: np.random.Generator,
                     grid: Optional[Grid] = None) -> State:
        """A random Gaussian (or sampled Gaussian) wave packet.

        Grid-path packets stay mild (low momentum, width >= 1) so the grid
        resolves their frequency content.
        """
        if self.backend == "grid":
            g = GaussianState.packet(self.D, rng.uniform(-0.5, 0.5, self.D),
                                     rng.uniform(-0.5, 0.5, self.D),
                                     float(rng.uniform(1.0, 1.3)))
            use = grid if grid is not None else self.grid
            assert use is not None
            return GridState.from_gaussian(g, use)
        return GaussianState.packet(self.D, rng.uniform(-0.5, 0.5, self.D),
                                    rng.uniform(-1, 1, self.D),
                                    float(rng.uniform(0.8, 1.2)))


def _state_distance(lhs: State, rhs: State) -> float:
    """Deviation between two states, scale-aware per backend.

    Gaussian states are compared by their parameters (the parameterization
    is unique up to 2*pi*i in the constant, handled via exponentiation);
    grid states by the quadrature L2 distance relative to the norm.
    """
    if isinstance(lhs, GaussianState):
        return max(float(np.abs(lhs.M - rhs.M).max(initial=0.0)),
                   float(np.abs(lhs.ell - rhs.ell).max(initial=0.0)),
                   abs(np.exp(lhs.k - rhs.k) - 1.0))
    diff = lhs.inner(lhs) - lhs.inner(rhs) - rhs.inner(lhs) + rhs.inner(rhs)
    return math.sqrt(max(float(np.real(diff)), 0.0) / rhs.norm_sq())


_VALIDATION_GRIDS = {1: (256, 5.0), 2: (96, 5.0), 3: (64, 5.0)}


def check_invariants(rep: RepInstance, rng: np.random.Generator,
                     trials: int = 5, scale: float = 0.8,
                     grid: Optional[Grid] = None) -> Dict[str, float]:
    """Max unitarity and homomorphism deviations over random samples.

    The grid path samples states on a wide validation grid so that shifted
    packets stay away from the periodic boundary.
    """
    from .harness import multiply  # local import to keep module load light

    if rep.backend == "grid" and grid is None:
        pts, hw = _VALIDATION_GRIDS[rep.D]
        grid = Grid(rep.D, pts, hw)
    uni = 0.0
    hom = 0.0
    for _ in range(trials):
        g1 = random_element(rep.harness, rng, scale)
        g2 = random_element(rep.harness, rng, scale)
        v = rep.random_state(rng, grid)
        nv = math.sqrt(v.norm_sq())
        pv = rep.apply(g1, v)
        uni = max(uni, abs(math.sqrt(pv.norm_sq()) - nv) / nv)
        lhs = rep.apply(g1, rep.apply(g2, v))
        rhs = rep.apply(multiply(g1, g2), v)
        hom = max(hom, _state_distance(lhs, rhs))
    return {"unitarity": uni, "homomorphism": hom}


def build_layer_rep(harness: Union[Harness, str], lambda_r: float,
                    backend: str = "closed", grid: Optional[Grid] = None,
                    validate: bool = True) -> RepInstance:
    """Representation of the top layer subgroup alone.

    The a-directions act by modulation, the b-directions by translation,
    and the central direction by the scalar exp(2 pi i lambda zeta).
    """
    if isinstance(harness, str):
        harness = build_harness(harness)
    top = harness.top
    if top.d < 1:
        raise ValueError("layer representation requires a symplectic part")
    if lambda_r == 0:
        raise ValueError("lambda must be nonzero")
    if abs(np.linalg.det(top.C)) < 1e-12:
        raise ValueError("degenerate pairing: functional outside the regular set")
    sub = _layer_harness(harness)
    rep = RepInstance(sub, ((top.r, float(lambda_r)),), backend, grid)
    if validate:
        checks = check_invariants(rep, np.random.default_rng(7), trials=3)
        tol = 1e-8 if backend == "closed" else 1e-4
        assert checks["unitarity"] < tol and checks["homomorphism"] < tol
    return rep


def stepwise_rep(harness_id: Union[Harness, str], gamma: Dict[int, float],
                 backend: str = "closed", grid: Optional[Grid] = None,
                 validate: bool = True) -> RepInstance:
    """Representation of the full layered group for a regular functional.

    Supported shape: every layer below the top is a line (d_r = 0).  The
    constructor refuses harnesses whose adjoint action does not stay inside
    the top layer or fails to preserve the polarization subspace spanned by
    the center and the a-directions (asserted during application).
    """
    h = build_harness(harness_id) if isinstance(harness_id, str) else harness_id
    for layer in h.layers[:-1]:
        if layer.d != 0:
            raise ValueError("unsupported harness shape: only the top layer may "
                             "carry a symplectic part")
    top = h.top
    gd = {int(r): float(v) for r, v in gamma.items()}
    if set(gd) != {layer.r for layer in h.layers}:
        raise ValueError("gamma must assign a coefficient to every layer")
    if top.d and gd[top.r] == 0:
        raise ValueError("the top-layer coefficient must be nonzero")
    if backend == "grid" and h.m > 1:
        raise ValueError("the grid path supports single-layer harnesses only")
    rep = RepInstance(h, tuple(sorted(gd.items())), backend, grid)
    if validate:
        checks = check_invariants(rep, np.random.default_rng(11), trials=3)
        tol = 1e-8 if backend == "closed" else 1e-4
        assert checks["unitarity"] < tol and checks["homomorphism"] < tol
    return rep


def coefficient(rep: RepInstance, u: State, v: State, g: GroupElement) -> complex:
    """Matrix coefficient <u, pi(g) v>."""
    return complex(u.inner(rep.apply(g, v)))


@dataclass(frozen=True)
class CoefficientField:
    """The coefficient function of a representation and a pair of states."""

    rep: RepInstance
    u: State
    v: State

    def at(self, g: GroupElement) -> complex:
        return coefficient(self.rep, self.u, self.v, g)

    def at_pq(self, p: np.ndarray, q: np.ndarray) -> complex:
        """Value on the non-central coordinates (earlier layers at identity)."""
        w = self.rep._apply_top(0.0, np.asarray(p, float), np.asarray(q, float), self.v)
        return complex(self.u.inner(w))

    def bound(self) -> float:
        """The Cauchy-Schwarz bound on |f|."""
        return math.sqrt(self.u.norm_sq() * self.v.norm_sq())


@dataclass(frozen=True)
class NormReport:
    """Measured coefficient norm squared against the density prediction."""

    value: float
    predicted: float
    rel_error: float
    path: str
    tail_bound: float

    def to_json(self) -> dict:
        return {"value": self.value, "predicted": self.predicted,
                "rel_error": self.rel_error, "path": self.path,
                "tail_bound": self.tail_bound}


def _closed_norm_sq(rep: RepInstance, u: GaussianState, v: GaussianState) -> Tuple[float, float]:
    """Exact integral of |<u, pi(0,p,q)v>|^2 over (p, q).

    The exponent of the coefficient is exactly quadratic in (p, q) and the
    Gaussian prefactor is constant, so the quadratic form is reconstructed
    from exponent values at unit steps and integrated in closed form.
    """
    D = rep.D
    n = 2 * D

    def parts(x: np.ndarray) -> Tuple[complex, complex]:
        w = rep._apply_top(0.0, x[:D], x[D:], v)
        return u.inner_parts(w)

    pre0, c = parts(np.zeros(n))
    Qm = np.zeros((n, n), dtype=complex)
    lv = np.zeros(n, dtype=complex)
    plus = np.zeros(n, dtype=complex)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        pre_p, ep = parts(e)
        pre_m, em = parts(-e)
        assert abs(pre_p - pre0) < 1e-9 * abs(pre0) and abs(pre_m - pre0) < 1e-9 * abs(pre0)
        Qm[i, i] = 0.5 * (ep + em) - c
        lv[i] = 0.5 * (ep - em)
        plus[i] = ep
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros(n)
            e[i] = e[j] = 1.0
            _, eij = parts(e)
            off = 0.5 * (eij - plus[i] - plus[j] + c)
            Qm[i, j] = Qm[j, i] = off
    # |f|^2 = |pre0|^2 exp(2 Re(x^T Qm x + lv.x + c))
    val = abs(pre0) ** 2 * gaussian_integral(-2.0 * Qm.real, 2.0 * lv.real,
                                             2.0 * c.real)
    return float(np.real(val)), 0.0


def _grid_norm_sq(rep: RepInstance, u: GridState, v: GridState,
                  q_stride: int, q_span: float) -> Tuple[float, float]:
    """Quadrature of the coefficient norm on tensor grids (single layer).

    For each grid-aligned shift q the phase integral over p is evaluated on
    the discrete frequency grid of the y-samples via the FFT.
    """
    grid = u.grid
    D = grid.D
    lam = rep.lam
    C = rep.harness.top.C
    assert np.allclose(C, np.eye(D)), "the grid path assumes the standard pairing"
    h = grid.h
    n = grid.points
    dp = 1.0 / (n * h * abs(lam))
    steps = int(q_span / (q_stride * h))
    g0 = np.conj(u.values)
    total = 0.0
    for flat in np.ndindex(*([2 * steps + 1] * D)):
        shifts = tuple((s - steps) * q_stride for s in flat)
        vs = np.roll(v.values, tuple(-s for s in shifts), axis=tuple(range(D)))
        fvals = np.fft.fftn(g0 * vs) * h ** D
        total += float(np.sum(np.abs(fvals) ** 2))
    hq = q_stride * h
    total *= dp ** D * hq ** D
    # outermost p-frequency magnitude (per axis) for the tail report
    p_edge = 1.0 / (2.0 * h * abs(lam))
    tail = 2.0 * D * math.erfc(math.sqrt(math.pi) * abs(lam) * p_edge)
    return total, tail


def coefficient_norm_sq(rep: RepInstance, u: State, v: State,
                        q_stride: Optional[int] = None,
                        q_span: float = 3.5) -> NormReport:
    """Integral of |<u, pi(.)v>|^2 over the non-central coordinates.

    Reports the measured value, the predicted norm_u^2 norm_v^2 / |Pf|, and
    their relative error.  The closed path is exact up to roundoff; the grid
    path reports an explicit tail bound for the frequency truncation.
    """
    if rep.D < 1:
        raise ValueError("the coefficient norm needs a symplectic layer")
    predicted = u.norm_sq() * v.norm_sq() / rep.pf_abs
    if rep.backend == "closed":
        value, tail = _closed_norm_sq(rep, u, v)
        path = "closed"
    else:
        if q_stride is None:
            q_stride = max(1, int(round(0.55 / u.grid.h)))
        value, tail = _grid_norm_sq(rep, u, v, q_stride, q_span)
        path = "grid"
    rel = abs(value - predicted) / predicted
    return NormReport(value, predicted, rel, path, tail)


@dataclass(frozen=True)
class RestrictionReport:
    """Pointwise and norm-level comparison of a restricted coefficient."""

    slice_value_big: complex
    slice_value_small: complex
    inner_xy: complex
    pointwise_abs_err: float
    norm_ratio_measured: float
    norm_ratio_predicted: float
    norm_ratio_rel_err: float
    factor: float
    central_deviation: float

    def to_json(self) -> dict:
        return {
            "slice_value_big": [self.slice_value_big.real, self.slice_value_big.imag],
            "slice_value_small": [self.slice_value_small.real, self.slice_value_small.imag],
            "pointwise_abs_err": self.pointwise_abs_err,
            "norm_ratio_measured": self.norm_ratio_measured,
            "norm_ratio_predicted": self.norm_ratio_predicted,
            "norm_ratio_rel_err": self.norm_ratio_rel_err,
            "factor": self.factor,
            "central_deviation": self.central_deviation,
        }


def _same_layer(a, b) -> bool:
    return (a.r == b.r and a.d == b.d and np.array_equal(a.z, b.z)
            and all(np.array_equal(p, q) for p, q in zip(a.a, b.a))
            and all(np.array_equal(p, q) for p, q in zip(a.b, b.b))
            and np.array_equal(a.C, b.C))


def _embed_small(h_big: Harness, g_small: GroupElement) -> GroupElement:
    """Extend a leading-layer subgroup element by identity coordinates."""
    extra = tuple((0.0, np.zeros(layer.d), np.zeros(layer.d))
                  for layer in h_big.layers[len(g_small.coords):])
    return GroupElement(h_big, g_small.coords + extra)


def restrict_and_renormalize(rep_big: RepInstance, rep_small: RepInstance,
                             u: State, v: State, x: State,
                             y: Optional[State] = None,
                             zeta_probe: Sequence[float] = (0.5, 1.0, 2.0),
                             ) -> Tuple[RestrictionReport, float]:
    """Compare the big-group coefficient of u (x) x, v (x) y with the small one.

    The small group must consist of the leading layers of the big harness and
    the functionals must agree there.  u and v are states of the small
    representation; x and y live in the complementary tensor factor, which in
    this realization is the state space of the big representation.  The big
    coefficient, evaluated on the quotient slice shared with the small group,
    is checked against <x, y> times the small coefficient; the measured norm
    ratio is compared with the density ratio scaled by the norms of x and y,
    and the square root of the density ratio is the returned renormalization
    factor.  The deviation of the pointwise identity along the small group's
    central directions is reported as a diagnostic, not asserted.
    """
    if y is None:
        y = x
    hb, hs = rep_big.harness, rep_small.harness
    shared = len(hs.layers)
    if shared >= hb.m or not all(
            _same_layer(a, b) for a, b in zip(hb.layers, hs.layers)):
        raise ValueError("the small harness must be a leading-layer subgroup")
    gb, gs = rep_big.gamma_dict, rep_small.gamma_dict
    if any(gb[layer.r] != gs[layer.r] for layer in hs.layers):
        raise ValueError("incompatible functionals: restriction must agree")

    inner_xy = complex(x.inner(y))
    scalar = complex(u.inner(v))  # the small states span a character line

    def f_big(g_small: GroupElement) -> complex:
        return scalar * complex(x.inner(rep_big.apply(_embed_small(hb, g_small), y)))

    def f_small(g_small: GroupElement) -> complex:
        return complex(u.inner(rep_small.apply(g_small, v)))

    e_small = identity(hs)
    big_val = f_big(e_small)
    small_val = f_small(e_small)
    # pointwise identity on the shared quotient slice (the identity coset)
    pointwise_err = abs(big_val - inner_xy * small_val)

    # measured norm of the big coefficient over its non-central coordinates,
    # relative to the small coefficient's value on its (zero-dim) slice
    big_norm = coefficient_norm_sq(rep_big, x, y).value * abs(scalar) ** 2
    measured = big_norm / abs(small_val) ** 2
    predicted = x.norm_sq() * y.norm_sq() * rep_small.pf_abs / rep_big.pf_abs
    factor = math.sqrt(rep_small.pf_abs / rep_big.pf_abs)

    # diagnostic: drift of the identity along the small central directions
    dev = 0.0
    for zeta in zeta_probe:
        for sgn in (1.0, -1.0):
            coords = tuple((sgn * float(zeta), np.zeros(layer.d), np.zeros(layer.d))
                           for layer in hs.layers)
            g = GroupElement(hs, coords)
            dev = max(dev, abs(f_big(g) - inner_xy * f_small(g)))

    report = RestrictionReport(
        slice_value_big=big_val, slice_value_small=small_val, inner_xy=inner_xy,
        pointwise_abs_err=pointwise_err,
        norm_ratio_measured=measured, norm_ratio_predicted=predicted,
        norm_ratio_rel_err=abs(measured - predicted) / predicted,
        factor=factor, central_deviation=dev,
    )
    return report, factor


def partial_center_transform(values: np.ndarray, spacing: float,
                             gamma: float) -> np.ndarray:
    """Fourier transform along the trailing (central) axis at frequency gamma.

    values[..., j] are samples over the central coordinate on a uniform grid
    centered at 0 with the given spacing; returns the integral of
    f(x, s) exp(2 pi i gamma s) ds by the rectangle rule.
    """
    ns = values.shape[-1]
    if abs(gamma) > 0.5 / spacing:
        raise ValueError(
            f"grid too coarse: |gamma| exceeds the resolvable bound {0.5 / spacing:g}")
    s = spacing * (np.arange(ns) - ns // 2)
    phases = np.exp(2j * np.pi * gamma * s)
    return spacing * np.tensordot(values, phases, axes=([-1], [0]))


def inverse_center_transform(slices: np.ndarray, gammas: np.ndarray,
                             spacing: float, ns: int) -> np.ndarray:
    """Reconstruct central-coordinate samples from frequency slices.

    slices[..., k] holds the partial transform at frequency gammas[k]; the
    reconstruction integrates slices * exp(-2 pi i gamma s) over the
    frequency grid (spacing 1 / (ns * spacing)) at the sample points
    s_j = spacing * (j - ns // 2).
    """
    s = spacing * (np.arange(ns) - ns // 2)
    dgamma = 1.0 / (ns * spacing)
    kernel = np.exp(-2j * np.pi * np.outer(gammas, s))
    return dgamma * np.tensordot(slices, kernel, axes=([-1], [0]))


@dataclass(frozen=True)
class DecayReport:
    """Weighted sup-norms and truncated L1 integrals over nested boxes."""

    sups: Dict[int, Tuple[float, ...]]  # k -> per-box weighted sup
    l1: Tuple[float, ...]
    boxes: Tuple[float, ...]
    sup_stable: bool
    l1_cauchy_gap: float
    passed: bool

    def to_json(self) -> dict:
        return {"sups": {str(k): list(v) for k, v in self.sups.items()},
                "l1": list(self.l1), "boxes": list(self.boxes),
                "sup_stable": self.sup_stable,
                "l1_cauchy_gap": self.l1_cauchy_gap, "passed": self.passed}


def schwartz_decay_report(field: Callable[[np.ndarray], np.ndarray], dim: int,
                          k_max: int = 3,
                          boxes: Sequence[float] = (2.0, 3.0, 4.0, 5.0, 6.0),
                          points_per_axis: int = 21,
                          sup_tol: float = 1e-6, l1_tol: float = 1e-6) -> DecayReport:
    """Rapid-decay evidence for a field on R^dim over nested boxes.

    field maps an array of shape (..., dim) to complex values.  For each k
    the weighted sup of (1 + |x|^2)^k |f(x)| must stabilize across boxes, and
    the truncated L1 integrals must be Cauchy; growth flags a failure.
    """
    boxes = tuple(boxes)
    sups: Dict[int, list] = {k: [] for k in range(k_max + 1)}
    l1 = []
    for R in boxes:
        axes = [np.linspace(-R, R, points_per_axis)] * dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        vals = np.abs(np.asarray(field(mesh)))
        r2 = np.sum(mesh ** 2, axis=-1)
        for k in range(k_max + 1):
            sups[k].append(float(np.max((1.0 + r2) ** k * vals)))
        step = (2.0 * R / (points_per_axis - 1)) ** dim
        l1.append(float(np.sum(vals) * step))
    sup_stable = all(
        sups[k][-1] <= sups[k][-2] * (1.0 + 1e-6) + sup_tol for k in range(k_max + 1))
    gap = abs(l1[-1] - l1[-2])
    passed = sup_stable and gap <= l1_tol
    return DecayReport({k: tuple(v) for k, v in sups.items()}, tuple(l1),
                       boxes, sup_stable, gap, passed)
