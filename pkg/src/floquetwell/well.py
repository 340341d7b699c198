"""Two-bound-state double well and its analytic continuation.

The well is the reflectionless-type potential

    V(x) = -2 w0 [s1^2 cosh^2(s2 x) + s2^2 sinh^2(s1 x)]
           / [s2 sinh(s1 x) sinh(s2 x) - s1 cosh(s1 x) cosh(s2 x)]^2

with exactly two bound states at E1 = -s1^2 and E2 = -s2^2 (s1 > s2 > 0),
both known in closed form.  Everything here is evaluated through
exponentially rescaled hyperbolic ratios (tanh/sech), which are
mathematically identical to the textbook forms but immune to overflow for
large |Re z| and stay finite arbitrarily far out on the real axis.

Shaking the well along a complex path shifts the argument of V and of the
eigenfunctions into the complex plane; all evaluations accept complex z
inside the analyticity stripe, whose half-width is found numerically from
the zeros of the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleProximityError, QuadratureError
from .twolevel import DriveSpec, ShakingPath, eval_path

# quadrature settings for normalizations and the dipole coupling; the
# integrands decay like exp(-2 s2 |x|), so the trapezoid rule on a uniform
# grid converges exponentially
_QUAD_HALF_WIDTH = 24.0
_QUAD_POINTS = 48001


def _sech_tanh(w):
    """Overflow-free sech and tanh of a complex array."""
    w = np.asarray(w, dtype=complex)
    a = np.real(w)
    s = np.where(a >= 0, 1.0, -1.0)
    aa = np.abs(a)
    em = np.exp(-2.0 * aa)
    eib = np.exp(1j * np.imag(w) * s)
    den = eib + em * np.conj(eib)
    return 2.0 * np.exp(-aa) / den, s * (eib - em * np.conj(eib)) / den


@dataclass(frozen=True)
class WellSpec:
    """Double-well parameters and derived constants.

    The normalizations fix unit L2 norm on the real line with the sign
    convention u1(0) > 0 and u2'(0) > 0; kappa is the dipole-like coupling
    integral of u2 against du1/dx.
    """

    sigma1: float
    sigma2: float
    E1: float = field(init=False)
    E2: float = field(init=False)
    omega0: float = field(init=False)
    N1: float = field(init=False)
    N2: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if not (self.sigma1 > self.sigma2 > 0):
            raise ValueError("require sigma1 > sigma2 > 0")
        object.__setattr__(self, "E1", -self.sigma1**2)
        object.__setattr__(self, "E2", -self.sigma2**2)
        object.__setattr__(self, "omega0", self.sigma1**2 - self.sigma2**2)
        n1, n2 = _normalizations(self.sigma1, self.sigma2)
        object.__setattr__(self, "N1", n1)
        object.__setattr__(self, "N2", n2)
        object.__setattr__(self, "kappa", coupling_kappa(self))


def _g(s1, s2, z):
    """Rescaled denominator g = s2 tanh(s1 z) tanh(s2 z) - s1.

    The physical denominator is cosh(s1 z) cosh(s2 z) * g; its zeros are
    exactly the zeros of g (the cosh zeros cancel against the numerator).
    """
    _, th1 = _sech_tanh(s1 * np.asarray(z, dtype=complex))
    _, th2 = _sech_tanh(s2 * np.asarray(z, dtype=complex))
    return s2 * th1 * th2 - s1


def potential(spec: WellSpec, z):
    """Analytic continuation of the double-well potential at complex z."""
    s1, s2 = spec.sigma1, spec.sigma2
    z = np.asarray(z, dtype=complex)
    sech1, th1 = _sech_tanh(s1 * z)
    sech2, th2 = _sech_tanh(s2 * z)
    g = s2 * th1 * th2 - s1
    if np.min(np.abs(g)) < 1e-12:
        raise PoleProximityError("potential evaluated within 1e-12 of a pole")
    num = -2.0 * spec.omega0 * (s1**2 * sech1**2 + s2**2 * th1**2 * sech2**2)
    out = num / (g * g)
    return out if out.shape else complex(out)


def _u_raw(spec: WellSpec, which: int, z):
    s1, s2 = spec.sigma1, spec.sigma2
    z = np.asarray(z, dtype=complex)
    sech1, th1 = _sech_tanh(s1 * z)
    sech2, th2 = _sech_tanh(s2 * z)
    g = s2 * th1 * th2 - s1
    if np.min(np.abs(g)) < 1e-12:
        raise PoleProximityError("eigenfunction evaluated within 1e-12 of a pole")
    if which == 1:
        return sech1 / g
    return th1 * sech2 / g


def eigenfunction(spec: WellSpec, which: int, z):
    """Bound eigenfunction u1 (even, ground) or u2 (odd, excited) at z."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    n = spec.N1 if which == 1 else spec.N2
    out = n * _u_raw(spec, which, z)
    return out if out.shape else complex(out)


def eigenfunction_derivative(spec: WellSpec, which: int, z):
    """d/dz of the bound eigenfunctions, by the closed-form chain rule."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    s1, s2 = spec.sigma1, spec.sigma2
    z = np.asarray(z, dtype=complex)
    sech1, th1 = _sech_tanh(s1 * z)
    sech2, th2 = _sech_tanh(s2 * z)
    g = s2 * th1 * th2 - s1
    if np.min(np.abs(g)) < 1e-12:
        raise PoleProximityError("derivative evaluated within 1e-12 of a pole")
    gp = s2 * (s1 * sech1**2 * th2 + s2 * th1 * sech2**2)
    if which == 1:
        num = -s1 * sech1 * th1
        out = spec.N1 * (num * g - sech1 * gp) / (g * g)
    else:
        num = s1 * sech1**2 * sech2 - s2 * th1 * th2 * sech2
        out = spec.N2 * (num * g - th1 * sech2 * gp) / (g * g)
    return out if out.shape else complex(out)


def _normalizations(s1: float, s2: float):
    x = np.linspace(-_QUAD_HALF_WIDTH, _QUAD_HALF_WIDTH, _QUAD_POINTS)
    dx = x[1] - x[0]
    sech1, th1 = _sech_tanh(s1 * x)
    sech2, th2 = _sech_tanh(s2 * x)
    g = s2 * th1 * th2 - s1
    u1r = np.real(sech1 / g)
    u2r = np.real(th1 * sech2 / g)
    i1 = np.trapezoid(u1r * u1r, dx=dx)
    i2 = np.trapezoid(u2r * u2r, dx=dx)
    # raw u1(0) = -1/s1 < 0 and raw u2 ~ -x near 0: flip both signs
    return -1.0 / np.sqrt(i1), -1.0 / np.sqrt(i2)


def coupling_kappa(spec: WellSpec, *, n_points: int = _QUAD_POINTS, tol: float = 1e-6) -> float:
    """Dipole-like coupling kappa = integral of u2 * du1/dx on the real line.

    Evaluated by the trapezoid rule at the working resolution and at half
    resolution; disagreement beyond ``tol`` raises.  Also enforces the
    integration-by-parts antisymmetry and the vanishing diagonal elements.
    """
    x = np.linspace(-_QUAD_HALF_WIDTH, _QUAD_HALF_WIDTH, n_points)
    dx = x[1] - x[0]
    u1 = np.real(eigenfunction(spec, 1, x))
    u2 = np.real(eigenfunction(spec, 2, x))
    du1 = np.real(eigenfunction_derivative(spec, 1, x))
    du2 = np.real(eigenfunction_derivative(spec, 2, x))
    kap = float(np.trapezoid(u2 * du1, dx=dx))
    kap_half = float(np.trapezoid((u2 * du1)[::2], dx=2 * dx))
    if abs(kap - kap_half) > tol:
        raise QuadratureError(
            f"kappa quadrature not converged: {kap:.3e} vs {kap_half:.3e} at half resolution"
        )
    mirror = float(np.trapezoid(u1 * du2, dx=dx))
    diag = max(
        abs(float(np.trapezoid(u1 * du1, dx=dx))),
        abs(float(np.trapezoid(u2 * du2, dx=dx))),
    )
    if abs(mirror + kap) > 1e-8 or diag > 1e-10:
        raise QuadratureError(
            "coupling integrals violate integration-by-parts identities: "
            f"int u1 u2' = {mirror:.3e} vs -kappa = {-kap:.3e}, diagonal max {diag:.3e}"
        )
    return kap


@dataclass
class StripeReport:
    """Analyticity-stripe estimate and path-containment flag."""

    half_width: float
    ok: bool
    max_abs_im_path: float
    nearest_zero: complex | None


def _denominator_zeros(spec: WellSpec, re_max: float, im_max: float):
    """Zeros of g in the closed upper-right quadrant by coarse scan plus
    Newton refinement (zeros come in +-Re, +-Im quartets by symmetry)."""
    s1, s2 = spec.sigma1, spec.sigma2
    re = np.linspace(0.0, re_max, 241)
    im = np.linspace(0.01, im_max, 201)
    RE, IM = np.meshgrid(re, im)
    Z = RE + 1j * IM
    G = np.abs(_g(s1, s2, Z))
    zeros = []
    for i in range(1, G.shape[0] - 1):
        for j in range(1, G.shape[1] - 1):
            block = G[i - 1 : i + 2, j - 1 : j + 2]
            if G[i, j] == block.min() and G[i, j] < 1.0:
                z = Z[i, j]
                for _ in range(80):
                    h = 1e-7
                    gz = _g(s1, s2, z)
                    gp = (_g(s1, s2, z + h) - _g(s1, s2, z - h)) / (2 * h)
                    if gp == 0:
                        break
                    step = gz / gp
                    z = z - step
                    if abs(step) < 1e-14:
                        break
                if abs(_g(s1, s2, z)) < 1e-10 and 0 < z.imag <= im_max + 0.1:
                    if not any(abs(z - z0) < 1e-6 for z0 in zeros):
                        zeros.append(complex(z))
    return zeros


def validate_stripe(spec: WellSpec, path: ShakingPath) -> StripeReport:
    """Estimate the stripe half-width L and check the path stays inside.

    L is the smallest |Im z| among the zeros of the potential denominator,
    located by a 2D scan with local refinement.  The path passes when
    max_t |Im x0(t)| < 0.9 L.
    """
    zeros = _denominator_zeros(spec, re_max=6.0 / spec.sigma2, im_max=3.5 / spec.sigma2)
    if zeros:
        nearest = min(zeros, key=lambda z: abs(z.imag))
        half_width = abs(nearest.imag)
    else:  # no singularity inside the scanned box
        nearest = None
        half_width = 3.5 / spec.sigma2
    t = np.linspace(0.0, path.period, 512, endpoint=False)
    max_im = float(np.max(np.abs(np.imag(eval_path(path, t)))))
    return StripeReport(
        half_width=float(half_width),
        ok=bool(max_im < 0.9 * half_width),
        max_abs_im_path=max_im,
        nearest_zero=nearest,
    )


def reduce_to_drive(spec: WellSpec, path: ShakingPath) -> DriveSpec:
    """Project the shaken well on its two bound states: V_i = kappa A_i."""
    report = validate_stripe(spec, path)
    if not report.ok:
        raise DomainError(
            f"shaking path leaves the analyticity stripe: max |Im x0| = "
            f"{report.max_abs_im_path:.3f} vs 0.9 L = {0.9 * report.half_width:.3f}"
        )
    return DriveSpec(
        V1=spec.kappa * path.A1,
        V2=spec.kappa * path.A2,
        omega0=spec.omega0,
        eps=path.eps,
    )


@dataclass(frozen=True)
class GridSpec:
    """Uniform spatial grid with a fixed time step for the field solver."""

    x_min: float
    x_max: float
    n_points: int
    dt: float = 0.01

    def __post_init__(self):
        if self.n_points < 128:
            raise ValueError("n_points must be at least 128")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
