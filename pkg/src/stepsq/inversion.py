"""Distribution characters via orbit integrals and Fourier inversion.

A test function lives on a harness group through its lift to the Lie algebra.
The character of the representation attached to a regular functional is the
normalized integral of the Euclidean Fourier transform over the affine
subspace spanned by the symplectic dual coordinates; inversion integrates the
characters of right translates against the density over the functional
parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from .harness import (
    GroupElement,
    Harness,
    build_harness,
    expm_nilpotent,
    logm_unipotent,
)
from .plancherel import plancherel_constant
from .states import GaussianState, gaussian_integral, gaussian_integral_parts


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Rapidly decaying function on a harness group, lifted to the algebra.

    The lift is a finite sum of Gaussians in the algebra coordinates fixed by
    the harness basis order (center, a-directions, b-directions per layer).
    """

    __test__ = False  # not a pytest test class

    harness: Harness
    terms: Tuple[GaussianState, ...]

    @property
    def dim(self) -> int:
        return self.harness.dim

    @staticmethod
    def standard(harness: Harness) -> "TestFunction":
        """exp(-pi |xi|^2) on the algebra coordinates."""
        n = harness.dim
        return TestFunction(harness, (GaussianState(
            np.pi * np.eye(n, dtype=complex), np.zeros(n, complex), 0.0),))

    @staticmethod
    def gaussian(harness: Harness, center: Sequence[float],
                 momentum: Sequence[float], width: float = 1.0) -> "TestFunction":
        return TestFunction(harness, (GaussianState.packet(
            harness.dim, center, momentum, width),))

    def scale(self, c: complex) -> "TestFunction":
        return TestFunction(self.harness, tuple(t.scale(c) for t in self.terms))

    def plus(self, other: "TestFunction") -> "TestFunction":
        assert other.harness is self.harness
        return TestFunction(self.harness, self.terms + other.terms)

    def lift_coords(self, g: GroupElement) -> np.ndarray:
        """Algebra coordinates of log g in the harness basis order."""
        w = logm_unipotent(g.to_matrix())
        coords = self.harness.read_coords(w)
        return np.array([coords[key] for key, _ in self.harness.coordinate_basis()])

    def value(self, g: GroupElement) -> complex:
        xi = self.lift_coords(g)
        return complex(sum(t.evaluate(xi) for t in self.terms))

    def value_at_lift(self, xi: np.ndarray) -> complex:
        return complex(sum(t.evaluate(xi) for t in self.terms))

    def sup_norm_bound(self) -> float:
        """Coarse upper bound max_xi sum |terms| (used for relative errors)."""
        total = 0.0
        for t in self.terms:
            # |exp(-x M x + l x + k)| maximized in closed form
            S = 2.0 * t.M.real
            val = gaussian_integral_parts(0.5 * S, t.ell.real, t.k.real)[1]
            total += float(np.exp(val.real))
        return total

    def conjugate_by(self, g: GroupElement) -> "TestFunction":
        """The function h -> f(g h g^-1)."""
        h = self.harness
        gm = g.to_matrix()
        gi = np.linalg.inv(gm)
        basis = h.coordinate_basis()
        cols = []
        for _, mat in basis:
            w = gm @ mat @ gi
            coords = h.read_coords(w)
            cols.append([coords[key] for key, _ in basis])
        ad = np.array(cols).T  # Ad(g) in the coordinate basis
        assert abs(abs(np.linalg.det(ad)) - 1.0) < 1e-9
        terms = []
        for t in self.terms:
            terms.append(GaussianState(ad.T @ t.M @ ad, ad.T @ t.ell, t.k))
        return TestFunction(h, tuple(terms))


@dataclass(frozen=True, eq=False)
class OrbitDescriptor:
    """A regular functional and the affine dual slice it labels."""

    harness: Harness
    lam: Tuple[Tuple[int, float], ...]  # (layer index, coefficient)

    @property
    def lam_dict(self) -> Dict[int, float]:
        return dict(self.lam)

    @property
    def d_list(self) -> Tuple[int, ...]:
        return tuple(layer.d for layer in self.harness.layers)

    @property
    def c(self) -> int:
        return plancherel_constant(self.d_list)

    @property
    def pf_abs(self) -> float:
        out = 1.0
        ld = self.lam_dict
        for layer in self.harness.layers:
            if layer.d:
                out *= abs(ld[layer.r]) ** layer.d * abs(np.linalg.det(layer.C))
        return out

    @property
    def slice_dim(self) -> int:
        return sum(2 * d for d in self.d_list)

    def check_regular(self) -> None:
        if self.pf_abs == 0.0:
            raise ValueError("singular functional: the density vanishes")


def orbit(harness: Union[Harness, str], lam: Dict[int, float]) -> OrbitDescriptor:
    """Build an orbit descriptor for a functional on the layer centers."""
    h = build_harness(harness) if isinstance(harness, str) else harness
    if set(int(r) for r in lam) != {layer.r for layer in h.layers}:
        raise ValueError("the functional must assign a value to every layer center")
    return OrbitDescriptor(h, tuple(sorted((int(r), float(v)) for r, v in lam.items())))


@dataclass(frozen=True, eq=False)
class FourierData:
    """Closed-form Fourier transform of a lifted test function."""

    f: TestFunction

    def __call__(self, xi_star: np.ndarray) -> complex:
        xi_star = np.asarray(xi_star, dtype=float)
        total = 0.0 + 0.0j
        for t in self.f.terms:
            total += gaussian_integral(t.M, t.ell - 2j * np.pi * xi_star, t.k)
        return complex(total)


def euclidean_ft(f: TestFunction) -> FourierData:
    """Classical Fourier transform of the lift, in closed form."""
    return FourierData(f)


def euclidean_ft_grid(samples: np.ndarray, spacing: float) -> Tuple[np.ndarray, np.ndarray]:
    """FFT Fourier transform of samples on [-W, W)^D with the given spacing.

    Returns (freqs_per_axis, values) with values indexed by the fft frequency
    grid; phases are corrected so the transform refers to the centered
    coordinates.
    """
    D = samples.ndim
    n = samples.shape[0]
    vals = np.fft.fftn(samples) * spacing ** D
    freqs = np.fft.fftfreq(n, spacing)
    half = n // 2
    for ax in range(D):
        shape = [1] * D
        shape[ax] = -1
        vals = vals * np.exp(2j * np.pi * freqs * (half * spacing)).reshape(shape)
    return freqs, vals


def _center_columns(h: Harness) -> List[int]:
    """Indices of the central coordinates in the harness basis order."""
    out = []
    for i, (key, _) in enumerate(h.coordinate_basis()):
        if key[1] == "z":
            out.append(i)
    return out


def _v_star_injection(h: Harness) -> np.ndarray:
    """Columns spanning the symplectic dual coordinates inside the full dual."""
    basis = h.coordinate_basis()
    cols = [i for i, (key, _) in enumerate(basis) if key[1] != "z"]
    V = np.zeros((len(basis), len(cols)))
    for j, i in enumerate(cols):
        V[i, j] = 1.0
    return V


def orbit_integral(fhat: FourierData, orb: OrbitDescriptor) -> complex:
    """Character value: normalized integral of fhat over the affine dual slice."""
    orb.check_regular()
    h = orb.harness
    basis = h.coordinate_basis()
    lam_full = np.zeros(len(basis))
    ld = orb.lam_dict
    for i, (key, _) in enumerate(basis):
        if key[1] == "z":
            lam_full[i] = ld[key[0]]
    V = _v_star_injection(h)
    total = 0.0 + 0.0j
    for t in fhat.f.terms:
        Minv = np.linalg.inv(t.M)
        a = t.ell - 2j * np.pi * lam_full
        S = (np.pi ** 2) * V.T @ Minv @ V
        S = 0.5 * (S + S.T)
        L = -1j * np.pi * V.T @ (Minv @ a)
        K = 0.25 * a @ Minv @ a + t.k
        pre, _ = gaussian_integral_parts(t.M, t.ell, t.k)  # normalization of fhat
        total += pre * gaussian_integral(S, L, K) if orb.slice_dim else pre * np.exp(K)
    return complex(total / (orb.c * orb.pf_abs))


def _slice_quadratic(f: TestFunction, x: GroupElement) -> List[Tuple[np.ndarray, np.ndarray, complex]]:
    """Per-term quadratic data of s -> f1(BCH(s . z, log x)) on the center slice.

    The product of a central exponential with x has algebra coordinates affine
    in s for these harnesses; affineness is verified by finite differences.
    """
    h = f.harness
    m = h.m
    x_mat = x.to_matrix()

    def xi(s: np.ndarray) -> np.ndarray:
        w = np.zeros((h.size, h.size))
        for r, layer in enumerate(h.layers):
            w = w + s[r] * layer.z
        coords = h.read_coords(logm_unipotent(expm_nilpotent(w) @ x_mat))
        return np.array([coords[key] for key, _ in h.coordinate_basis()])

    b = xi(np.zeros(m))
    A = np.zeros((h.dim, m))
    for r in range(m):
        e = np.zeros(m)
        e[r] = 1.0
        plus, minus = xi(e), xi(-e)
        A[:, r] = plus - b
        assert np.allclose(minus, b - A[:, r], atol=1e-9), \
            "central slice coordinates must be affine"
    for r in range(m):
        for s_ in range(r + 1, m):
            e = np.zeros(m)
            e[r] = e[s_] = 1.0
            assert np.allclose(xi(e), b + A[:, r] + A[:, s_], atol=1e-9)
    out = []
    for t in f.terms:
        S = A.T @ (t.M @ A)
        S = 0.5 * (S + S.T)
        L0 = A.T @ (t.ell - 2.0 * t.M @ b)
        K = complex(-b @ t.M @ b + t.ell @ b + t.k)
        out.append((S, L0, K))
    return out


def character_of_translate(f: TestFunction, x: GroupElement,
                           orb: OrbitDescriptor) -> complex:
    """Character of the right translate r_x f via the center-slice reduction."""
    orb.check_regular()
    h = f.harness
    lam_vec = np.array([orb.lam_dict[layer.r] for layer in h.layers])
    total = 0.0 + 0.0j
    for S, L0, K in _slice_quadratic(f, x):
        total += gaussian_integral(S, L0 - 2j * np.pi * lam_vec, K)
    return complex(total / (orb.c * orb.pf_abs))


@dataclass(frozen=True)
class InversionResult:
    """Reconstruction of f(x) from the characters of its right translates."""

    value: complex
    reference: complex
    rel_error: float
    cutoff: float
    tail_bound: float

    def to_json(self) -> dict:
        return {"value": [self.value.real, self.value.imag],
                "reference": [self.reference.real, self.reference.imag],
                "rel_error": self.rel_error, "cutoff": self.cutoff,
                "tail_bound": self.tail_bound}


def fourier_inversion(f: TestFunction, x: GroupElement,
                      tolerance: float = 1e-6,
                      cutoff: Optional[float] = None) -> InversionResult:
    """Reconstruct f(x) by integrating the translated characters.

    The integrand over the functional parameters is c * Theta(r_x f) * |Pf|;
    the density cancels the normalization, leaving a rapidly decaying
    integrand whose truncation tail is estimated from a Gaussian fit and kept
    below tolerance / 10.
    """
    h = f.harness
    m = h.m
    quadratics = _slice_quadratic(f, x)

    def integrand(lam_vec: np.ndarray) -> complex:
        total = 0.0 + 0.0j
        for S, L0, K in quadratics:
            total += gaussian_integral(S, L0 - 2j * np.pi * lam_vec, K)
        return complex(total)

    def envelope(rad: float) -> float:
        worst = 0.0
        for signs in np.ndindex(*([2] * m)):
            v = rad * (2.0 * np.array(signs) - 1.0)
            worst = max(worst, abs(integrand(v)))
        return worst

    if cutoff is None:
        cutoff = 2.0
        while envelope(cutoff) > tolerance / 100.0 and cutoff < 64.0:
            cutoff *= 1.5
    # Gaussian-fit tail estimate from the envelope at cutoff/2 and cutoff
    v1, v2 = envelope(cutoff / 2.0) + 1e-300, envelope(cutoff) + 1e-300
    alpha = max(math.log(v1 / v2) / (cutoff ** 2 * 0.75), 1e-6)
    tail = v2 / (2.0 * alpha * cutoff) * (2.0 * cutoff) ** max(m - 1, 0) * 2 * m

    if m == 1:
        val = quad(lambda t: integrand(np.array([t])).real, -cutoff, cutoff,
                   limit=200)[0] \
            + 1j * quad(lambda t: integrand(np.array([t])).imag, -cutoff, cutoff,
                        limit=200)[0]
    elif m == 2:
        def inner(t1: float) -> complex:
            re = quad(lambda t2: integrand(np.array([t1, t2])).real,
                      -cutoff, cutoff, limit=100)[0]
            im = quad(lambda t2: integrand(np.array([t1, t2])).imag,
                      -cutoff, cutoff, limit=100)[0]
            return re + 1j * im
        val = quad(lambda t1: inner(t1).real, -cutoff, cutoff, limit=100)[0] \
            + 1j * quad(lambda t1: inner(t1).imag, -cutoff, cutoff, limit=100)[0]
    else:
        raise ValueError("inversion is implemented for one or two layers")

    reference = f.value(x)
    scale = max(f.sup_norm_bound(), 1e-300)
    return InversionResult(complex(val), complex(reference),
                           abs(val - reference) / scale, float(cutoff), tail)


@dataclass(frozen=True)
class LimitInversionReport:
    """Two-stage inversion agreement for a coherent restriction family."""

    coherent: bool
    coherence_gap: float
    stage_small: InversionResult
    stage_big: InversionResult
    agree: bool

    def to_json(self) -> dict:
        return {"coherent": self.coherent, "coherence_gap": self.coherence_gap,
                "stage_small": self.stage_small.to_json(),
                "stage_big": self.stage_big.to_json(), "agree": self.agree}


def restrict_test_function(f_big: TestFunction, small: Harness) -> TestFunction:
    """Restriction of the lift to the leading-layer subalgebra coordinates."""
    big_keys = [key for key, _ in f_big.harness.coordinate_basis()]
    small_keys = [key for key, _ in small.coordinate_basis()]
    idx = [big_keys.index(k) for k in small_keys]
    terms = []
    for t in f_big.terms:
        terms.append(GaussianState(t.M[np.ix_(idx, idx)], t.ell[idx], t.k))
    return TestFunction(small, tuple(terms))


def limit_inversion_check(f_big: TestFunction, f_small: TestFunction,
                          x_small: GroupElement, tolerance: float = 1e-3,
                          probe: Sequence[float] = (-1.5, -0.5, 0.0, 0.5, 1.5),
                          ) -> LimitInversionReport:
    """Verify both stages of a restriction chain reconstruct f at x.

    f_small must be the restriction of f_big to the leading-layer subgroup;
    the coherence is checked on a probe grid and an incoherent family is
    flagged instead of silently inverted.
    """
    big, small = f_big.harness, f_small.harness
    gap = 0.0
    for vals in np.ndindex(*([len(probe)] * small.m)):
        coords_small = tuple((probe[v], np.zeros(layer.d), np.zeros(layer.d))
                             for v, layer in zip(vals, small.layers))
        g_small = GroupElement(small, coords_small)
        extra = tuple((0.0, np.zeros(layer.d), np.zeros(layer.d))
                      for layer in big.layers[small.m:])
        g_big = GroupElement(big, coords_small + extra)
        gap = max(gap, abs(f_small.value(g_small) - f_big.value(g_big)))
    coherent = gap < 1e-9
    extra = tuple((0.0, np.zeros(layer.d), np.zeros(layer.d))
                  for layer in big.layers[small.m:])
    x_big = GroupElement(big, x_small.coords + extra)
    stage_small = fourier_inversion(f_small, x_small, tolerance=tolerance / 10)
    stage_big = fourier_inversion(f_big, x_big, tolerance=tolerance / 10)
    agree = (coherent and stage_small.rel_error < tolerance
             and stage_big.rel_error < tolerance)
    return LimitInversionReport(coherent, gap, stage_small, stage_big, agree)
