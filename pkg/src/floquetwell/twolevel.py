"""Reduced two-level dynamics of a periodically shaken quantum well.

The well supports two bound states split by ``omega0``.  Shaking it along a
closed loop in the complex plane reduces, after projecting on the bound
states and removing fast phases, to

    i da1/dt = -(omega0/2) a1 + eps f(eps t) a2
    i da2/dt = +(omega0/2) a2 + eps f(eps t) a1

with the two-harmonic modulation f(eps t) = V1 e^{i eps t} + V2 e^{-i eps t}.
Real modulation (V1 = V2* ) is Hermitian shaking; a one-sided modulation
(V1 = 0 or V2 = 0) is the genuinely non-Hermitian case where the
one-period propagator can become defective (a Floquet exceptional point).

This module provides exact propagation, the monodromy matrix and its
quasi-energies, Floquet eigenstates and their Fourier content, WKB
approximants, resonance location/classification, and the generalized
eigenvector at an exceptional point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import schur

from .errors import (
    AmbiguityError,
    CoalescenceError,
    ContractViolationError,
    DomainError,
    IntegrationError,
)

# Integrator contract: adaptive embedded Runge-Kutta at these tolerances.
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_METHOD = "DOP853"

# An eigenvector overlap this close to one, together with a folded gap below
# EP_GAP_FACTOR * eps, flags a coalescence (exceptional point).  Sharp avoided
# crossings keep orthogonal eigenvectors in the Hermitian case, so the two
# conditions together separate true EPs from narrow avoided crossings.
EP_DEFECT_THRESHOLD = 0.999
EP_GAP_FACTOR = 1e-6


def _tol(*values):
    return 1e-14 * (1.0 + sum(abs(v) for v in values))


@dataclass(frozen=True)
class ShakingPath:
    """Closed displacement loop of the well in the complex plane.

    x0(eps t) = -i A1 e^{i eps t} + i A2 e^{-i eps t} + i (A1 - A2),
    so that x0(0) = 0 exactly.  A1 = A2 = A/2 gives the real sinusoidal
    displacement A sin(eps t); A1 = 0, A2 = iA gives the complex loop
    A - A e^{-i eps t}.
    """

    A1: complex
    A2: complex
    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("drive frequency eps must be positive")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.eps

    @property
    def is_hermitian(self) -> bool:
        """True iff the displacement is real at all times (A1 = A2*)."""
        return abs(self.A1 - np.conj(self.A2)) <= _tol(self.A1, self.A2)


def eval_path(path: ShakingPath, t):
    """Displacement x0 at time ``t`` (scalar or array)."""
    ph = np.exp(1j * path.eps * np.asarray(t))
    return -1j * path.A1 * ph + 1j * path.A2 / ph + 1j * (path.A1 - path.A2)


@dataclass(frozen=True)
class DriveSpec:
    """Two-level drive: couplings V1, V2, level splitting omega0, frequency eps."""

    V1: complex
    V2: complex
    omega0: float
    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("drive frequency eps must be positive")
        if self.omega0 <= 0:
            raise ValueError("level splitting omega0 must be positive")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.eps

    @property
    def is_hermitian(self) -> bool:
        return abs(self.V1 - np.conj(self.V2)) <= _tol(self.V1, self.V2)

    @property
    def coupling_product(self) -> complex:
        return self.V1 * self.V2

    def f(self, t):
        """Modulation f(eps t) = V1 e^{i eps t} + V2 e^{-i eps t}."""
        ph = np.exp(1j * self.eps * np.asarray(t))
        return self.V1 * ph + self.V2 / ph

    def replace_eps(self, eps: float) -> "DriveSpec":
        return DriveSpec(self.V1, self.V2, self.omega0, eps)


@dataclass
class TrajectoryRecord:
    """Sampled two-level trajectory."""

    times: np.ndarray
    a1_sq: np.ndarray
    a2_sq: np.ndarray
    norm: np.ndarray
    amplitudes: np.ndarray  # (n, 2) complex samples of (a1, a2)


@dataclass
class MonodromyResult:
    """One-period propagator and its spectral data.

    ``mu1``/``mu2`` are folded into [0, eps); the unfolded values anchor the
    branches to the adiabatic limits -omega0/2 (level-1 dominant) and
    +omega0/2.  ``defect`` is the overlap |<q1_hat, q2_hat>| of the
    unit-normalized eigenvectors: 0 for an orthogonal (normal) propagator,
    1 at an exceptional point.
    """

    M: np.ndarray
    lambda1: complex
    lambda2: complex
    mu1: complex
    mu2: complex
    mu1_unfolded: complex
    mu2_unfolded: complex
    q1: np.ndarray
    q2: np.ndarray
    defect: float
    eps: float
    omega0: float
    complex_quasi_energies: bool

    @property
    def folded_gap(self) -> float:
        """Circular distance of the folded quasi-energies on [0, eps)."""
        d = abs(float(np.real(self.mu1)) - float(np.real(self.mu2)))
        return min(d, self.eps - d)

    @property
    def is_defective(self) -> bool:
        return (
            self.defect >= EP_DEFECT_THRESHOLD
            and self.folded_gap <= EP_GAP_FACTOR * self.eps
        )


@dataclass
class FloquetState:
    """One periodic Floquet eigenstate sampled over a period.

    ``samples[k]`` is W(t_k) on the half-open uniform grid t_k = k T / n;
    ``fourier_A``/``fourier_B`` are the coefficients of exp(-i n eps t) in
    the two components, stored in FFT index order ``fourier_n``.
    """

    samples: np.ndarray
    fourier_A: np.ndarray
    fourier_B: np.ndarray
    mu: complex
    times: np.ndarray
    eps: float
    periodicity_defect: float = 0.0

    @property
    def fourier_n(self) -> np.ndarray:
        n = len(self.fourier_A)
        return np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(int)


class WKBQuasiEnergies(NamedTuple):
    """Quadrature WKB quasi-energies and their small-eps closed form."""

    mu1: float
    mu2: float
    mu1_series: float
    mu2_series: float


class ResonanceScan(NamedTuple):
    """Outcome of a quasi-energy scan across one resonance."""

    kind: str  # "crossing" | "avoided" | "ep"
    eps_star: float
    gap: float  # minimal folded gap = 2*Delta
    defect: float
    N: int


def _hamiltonian(drive: DriveSpec, t: float) -> np.ndarray:
    c = drive.eps * drive.f(t)
    return np.array([[-0.5 * drive.omega0, c], [c, 0.5 * drive.omega0]])


def propagate(
    drive: DriveSpec,
    a0,
    t_final: float,
    record_every: float,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
) -> TrajectoryRecord:
    """Integrate the two-level equations from ``a0`` and sample |a_i|^2.

    Parameters
    ----------
    drive : DriveSpec
    a0 : length-2 complex initial amplitudes
    t_final : end time (> 0)
    record_every : sampling cadence in time units
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    a0 = np.asarray(a0, dtype=complex)
    V1, V2, w0, eps = drive.V1, drive.V2, drive.omega0, drive.eps

    def rhs(t, y):
        c = eps * (V1 * np.exp(1j * eps * t) + V2 * np.exp(-1j * eps * t))
        return (
            -1j * (-0.5 * w0 * y[0] + c * y[1]),
            -1j * (0.5 * w0 * y[1] + c * y[0]),
        )

    n_rec = int(np.floor(t_final / record_every + 1e-9))
    t_eval = np.linspace(0.0, n_rec * record_every, n_rec + 1)
    sol = solve_ivp(rhs, (0.0, t_final), a0, method=method, rtol=rtol, atol=atol,
                    t_eval=t_eval, dense_output=False)
    if not sol.success:
        t_reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"integration failed: {sol.message}", t_reached)
    amps = sol.y.T
    a1_sq = np.abs(amps[:, 0]) ** 2
    a2_sq = np.abs(amps[:, 1]) ** 2
    return TrajectoryRecord(sol.t, a1_sq, a2_sq, a1_sq + a2_sq, amps)


def _propagator_at(drive: DriveSpec, times, *, rtol, atol, method=DEFAULT_METHOD):
    """Fundamental matrix U(t) at the requested times (U(0) = 1)."""
    V1, V2, w0, eps = drive.V1, drive.V2, drive.omega0, drive.eps

    def rhs(t, y):
        c = eps * (V1 * np.exp(1j * eps * t) + V2 * np.exp(-1j * eps * t))
        Y = y.reshape(2, 2)
        return (-1j * (np.array([[-0.5 * w0, c], [c, 0.5 * w0]]) @ Y)).ravel()

    times = np.asarray(times, dtype=float)
    sol = solve_ivp(rhs, (0.0, float(times[-1])), np.eye(2, dtype=complex).ravel(),
                    method=method, rtol=rtol, atol=atol, t_eval=times)
    if not sol.success:
        t_reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"propagator integration failed: {sol.message}", t_reached)
    return sol.y.T.reshape(-1, 2, 2)


def _eig2(M):
    """Closed-form eigenpairs of a 2x2 matrix.

    The discriminant is formed as (M00-M11)^2 + 4 M01 M10 rather than
    tr^2 - 4 det, which keeps relative accuracy near degeneracies.
    """
    tr = M[0, 0] + M[1, 1]
    s = np.sqrt((M[0, 0] - M[1, 1]) ** 2 + 4.0 * M[0, 1] * M[1, 0])
    lams = (0.5 * (tr + s), 0.5 * (tr - s))

    def vec(lam):
        v1 = np.array([M[0, 1], lam - M[0, 0]])
        v2 = np.array([lam - M[1, 1], M[1, 0]])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        n = np.linalg.norm(v)
        if n == 0.0:  # scaled identity: any basis is an eigenbasis
            return None
        return v / n

    q1, q2 = vec(lams[0]), vec(lams[1])
    if q1 is None:
        q1 = np.array([1.0 + 0j, 0.0])
    if q2 is None:
        q2 = np.array([-np.conj(q1[1]), np.conj(q1[0])])
    return lams, (q1, q2)


def _schur_defect(M, noise_floor: float) -> float:
    """Eigenvector-coalescence overlap from the 2x2 Schur form.

    For T = [[l1, n], [0, l2]] the unit eigenvectors overlap by
    |n| / sqrt(|n|^2 + |l1-l2|^2).  Below ``noise_floor`` both |n| and the
    eigenvalue separation are indistinguishable from integration noise
    (e.g. the monodromy is a scaled identity at an even resonance), so the
    overlap is reported as ~0 instead of an arbitrary ratio of noise.
    """
    T, _ = schur(M, output="complex")
    n = abs(T[0, 1])
    d = abs(T[0, 0] - T[1, 1])
    return float(n / np.sqrt(n * n + d * d + noise_floor * noise_floor))


def _principal_mu(lam: complex, eps: float) -> complex:
    """mu = (i eps / 2 pi) Log(lambda), principal branch."""
    return 1j * eps / (2.0 * np.pi) * np.log(lam)


def fold(mu, eps: float):
    """Fold the real part of a quasi-energy into [0, eps)."""
    mu = complex(mu)
    r = np.real(mu) % eps
    return r if abs(mu.imag) == 0 else r + 1j * mu.imag


def _wkb_quadrature_targets(drive: DriveSpec, n: int = 4096):
    """Period average of sqrt((w0/2)^2 + eps^2 f^2), or None when the
    radicand path meets the branch cut of the principal square root."""
    tau = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    f = drive.V1 * np.exp(1j * tau) + drive.V2 * np.exp(-1j * tau)
    rad = (0.5 * drive.omega0) ** 2 + drive.eps**2 * f * f
    if np.any(np.real(rad) <= 0):
        return None
    bar = np.mean(np.sqrt(rad))
    return (-bar, +bar)


def monodromy(
    drive: DriveSpec,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
) -> MonodromyResult:
    """One-period propagator, quasi-energies and coalescence metric.

    The propagator over [0, 2 pi / eps] is built column-by-column from the
    canonical initial vectors; eigenpairs come from the closed-form 2x2
    eigenproblem.  mu_i = (i eps / 2 pi) Log(lambda_i) on the principal
    branch, folded into [0, eps).  Unfolded values are anchored to the WKB
    period average (exact for one-sided drives), which connects branch 1
    to -omega0/2 at small eps.  For strong gain/loss the quasi-energies get
    an imaginary part and are flagged, not rejected.
    """
    T = drive.period
    M = _propagator_at(drive, [0.0, T], rtol=rtol, atol=atol, method=method)[-1]
    (l1, l2), (q1, q2) = _eig2(M)
    mu_p = [_principal_mu(l1, drive.eps), _principal_mu(l2, drive.eps)]

    is_complex = bool(max(abs(abs(l1) - 1.0), abs(abs(l2) - 1.0)) > 1e-8)

    targets = _wkb_quadrature_targets(drive)
    if targets is None:
        targets = (-0.5 * drive.omega0, +0.5 * drive.omega0)
    # Pair (eigenvalue, eigenvector) branches with the (-, +) targets by
    # unfolded proximity; ties broken by level-1 dominance of q1.
    def unfold(mu, target):
        k = np.round((np.real(target) - np.real(mu)) / drive.eps)
        return mu + k * drive.eps

    order_cost = []
    for perm in ((0, 1), (1, 0)):
        mus = (mu_p[perm[0]], mu_p[perm[1]])
        cost = abs(np.real(unfold(mus[0], targets[0])) - np.real(targets[0])) + abs(
            np.real(unfold(mus[1], targets[1])) - np.real(targets[1])
        )
        order_cost.append(cost)
    if abs(order_cost[0] - order_cost[1]) <= 1e-9 * drive.eps:
        # degenerate pairing (at/near a crossing): branch 1 = level-1 dominant
        perm = (0, 1) if abs(q1[0]) >= abs(q2[0]) else (1, 0)
    else:
        perm = (0, 1) if order_cost[0] <= order_cost[1] else (1, 0)

    lam = (l1, l2)
    qs = (q1, q2)
    lam1, lam2 = lam[perm[0]], lam[perm[1]]
    q1, q2 = qs[perm[0]], qs[perm[1]]
    mu1_u = unfold(mu_p[perm[0]], targets[0])
    mu2_u = unfold(mu_p[perm[1]], targets[1])

    noise_floor = 100.0 * rtol * np.linalg.norm(M)
    defect = _schur_defect(M, noise_floor)

    def maybe_real(z):
        return float(np.real(z)) if not is_complex else complex(z)

    return MonodromyResult(
        M=M,
        lambda1=complex(lam1),
        lambda2=complex(lam2),
        mu1=maybe_real(fold(mu1_u, drive.eps)),
        mu2=maybe_real(fold(mu2_u, drive.eps)),
        mu1_unfolded=maybe_real(mu1_u),
        mu2_unfolded=maybe_real(mu2_u),
        q1=q1,
        q2=q2,
        defect=defect,
        eps=drive.eps,
        omega0=drive.omega0,
        complex_quasi_energies=is_complex,
    )


def floquet_states(
    drive: DriveSpec,
    mono: MonodromyResult,
    n_samples: int,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> tuple[FloquetState, FloquetState]:
    """Both periodic Floquet eigenstates sampled over one period.

    W_i(t_k) = U(t_k) q_i exp(+i mu_i t_k) on n_samples uniform points of
    the half-open period; Fourier coefficients by discrete transform.
    Raises CoalescenceError at an exceptional point, where a single
    eigenvector remains and the generalized eigenvector must be used.
    """
    if mono.defect >= EP_DEFECT_THRESHOLD:
        raise CoalescenceError(
            "Floquet eigenstates have coalesced (defect "
            f"{mono.defect:.6f}); use generalized_eigenvector instead"
        )
    T = drive.period
    times = np.linspace(0.0, T, n_samples + 1)
    U = _propagator_at(drive, times, rtol=rtol, atol=atol)

    states = []
    for q, mu in ((mono.q1, mono.mu1_unfolded), (mono.q2, mono.mu2_unfolded)):
        W = np.einsum("kij,j->ki", U, q) * np.exp(1j * complex(mu) * times)[:, None]
        pdef = float(np.linalg.norm(W[-1] - W[0]) / max(np.max(np.abs(W)), 1e-300))
        Wp = W[:-1]
        A = np.fft.ifft(Wp[:, 0])
        B = np.fft.ifft(Wp[:, 1])
        states.append(
            FloquetState(
                samples=Wp,
                fourier_A=A,
                fourier_B=B,
                mu=mu,
                times=times[:-1],
                eps=drive.eps,
                periodicity_defect=pdef,
            )
        )
    return states[0], states[1]


def unbalance_factor(state: FloquetState) -> float:
    """| max_n |A_n| - max_n |B_n| | with the largest coefficient scaled to 1.

    Close to one for a level-dominant eigenstate, close to zero when both
    levels carry equal peak Fourier weight.
    """
    ma = float(np.max(np.abs(state.fourier_A)))
    mb = float(np.max(np.abs(state.fourier_B)))
    top = max(ma, mb)
    if top == 0.0:
        raise ContractViolationError("all-zero Floquet state")
    return abs(ma - mb) / top


def wkb_quasi_energies(drive: DriveSpec, n: int = 4096) -> WKBQuasiEnergies:
    """Adiabatic (WKB) quasi-energies by period quadrature, plus the
    leading-order closed form.

    mu_{1,2} ~ -/+ (eps / 2 pi) * integral of sqrt((w0/2)^2 + eps^2 f^2)
    over one period.  The closed form is the small-eps expansion
    -/+ (w0/2)(1 + 4 V1 V2 eps^2 / w0^2); its quadratic coefficient is fixed
    by the period average <f^2> = 2 V1 V2 and matches the resonance
    condition eps_N ~ (w0/N)(1 + 4 V1 V2 / N^2).
    """
    p = drive.coupling_product
    if abs(np.imag(p)) > 1e-12 * max(abs(p), 1.0):
        raise DomainError("WKB quasi-energies require a real coupling product V1*V2")
    targets = _wkb_quadrature_targets(drive, n)
    if targets is None:
        raise DomainError(
            "radicand (w0/2)^2 + eps^2 f^2 leaves the principal branch; "
            "use the monodromy route"
        )
    mu1 = float(np.real(targets[0]))
    mu2 = float(np.real(targets[1]))
    series = 0.5 * drive.omega0 * (1.0 + 4.0 * np.real(p) * drive.eps**2 / drive.omega0**2)
    return WKBQuasiEnergies(mu1, mu2, -series, +series)


def _lambda_inst(drive: DriveSpec, t):
    f = drive.f(t)
    return np.sqrt((0.5 * drive.omega0) ** 2 + drive.eps**2 * f * f)


def wkb_states(drive: DriveSpec, t: float, n_quad: int = 512):
    """The two WKB vectors at time ``t`` including the accumulated phase.

    W1 = (w0/2 + lambda, -eps f)/w0 * exp(+i int_0^t lambda + i mu1 t),
    W2 = (eps f, w0/2 + lambda)/w0 * exp(-i int_0^t lambda + i mu2 t).
    The column parts are exact instantaneous eigenvectors of the frozen
    two-level matrix with eigenvalues -/+ lambda(eps t).
    """
    wkb = wkb_quasi_energies(drive)
    # accumulated phase by Gauss-Legendre on [0, t]
    if t != 0.0:
        n_nodes = min(4096, n_quad * (1 + int(abs(t) / drive.period)))
        xg, wg = np.polynomial.legendre.leggauss(n_nodes)
        tg = 0.5 * t * (xg + 1.0)
        phase = complex(0.5 * t * np.sum(wg * _lambda_inst(drive, tg)))
    else:
        phase = 0.0
    lam = complex(_lambda_inst(drive, t))
    f = complex(drive.f(t))
    w0 = drive.omega0
    W1 = (
        np.array([0.5 * w0 + lam, -drive.eps * f]) / w0
        * np.exp(1j * phase + 1j * wkb.mu1 * t)
    )
    W2 = (
        np.array([drive.eps * f, 0.5 * w0 + lam]) / w0
        * np.exp(-1j * phase + 1j * wkb.mu2 * t)
    )
    return W1, W2


def resonance_estimate(V1, V2, omega0: float, N: int) -> float:
    """Leading-order location eps_N of the N-photon quasi-energy degeneracy.

    eps_N ~ (omega0/N)(1 + 4 V1 V2 / N^2); exact omega0/N when V1 V2 = 0.
    """
    if N < 1:
        raise ValueError("resonance order N must be >= 1")
    p = complex(V1) * complex(V2)
    if abs(p.imag) > 1e-12 * max(abs(p), 1.0):
        raise DomainError("resonance formula requires a real coupling product")
    if p == 0:
        return omega0 / N
    return (omega0 / N) * (1.0 + 4.0 * p.real / N**2)


def _golden_minimize(fun, a: float, b: float, iters: int):
    invphi = 0.5 * (np.sqrt(5.0) - 1.0)
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    n_evals = 2
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
        n_evals += 1
    x = 0.5 * (a + b)
    return x, n_evals


def classify_resonance(
    drive: DriveSpec,
    N: int,
    scan_width: float,
    *,
    center: float | None = None,
    coarse_points: int = 33,
    golden_iters: int = 45,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> ResonanceScan:
    """Locate and classify the quasi-energy degeneracy of order ``N``.

    Scans the folded quasi-energy gap across [center - w/2, center + w/2]
    (center defaults to the leading-order resonance estimate), refines the
    minimum by golden-section search, and reports the crossing kind:
    exact crossing (gap below resolution, orthogonal eigenvectors),
    avoided crossing with minimal gap 2*Delta, or EP crossing (gap below
    resolution with coalescing eigenvectors).
    """
    if center is None:
        center = resonance_estimate(drive.V1, drive.V2, drive.omega0, N)
    lo, hi = center - 0.5 * scan_width, center + 0.5 * scan_width
    if lo <= 0:
        raise ValueError("scan window extends to non-positive frequencies")

    def gap_at(e):
        return monodromy(drive.replace_eps(e), rtol=rtol, atol=atol).folded_gap

    grid = np.linspace(lo, hi, coarse_points)
    gaps = np.array([gap_at(e) for e in grid])
    # more than one deep, separated local minimum means the window covers
    # several resonances
    thresh = gaps.min() + 0.25 * (gaps.max() - gaps.min())
    minima = [
        i
        for i in range(1, coarse_points - 1)
        if gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[i + 1] and gaps[i] < thresh
    ]
    separated = [
        i for j, i in enumerate(minima) if j == 0 or grid[i] - grid[minima[j - 1]] > scan_width / 8
    ]
    if len(separated) > 1:
        raise AmbiguityError(
            f"scan window [{lo:g}, {hi:g}] contains {len(separated)} candidate resonances"
        )
    i0 = int(np.argmin(gaps))
    a = grid[max(0, i0 - 1)]
    b = grid[min(coarse_points - 1, i0 + 1)]
    eps_star, n_evals = _golden_minimize(gap_at, a, b, golden_iters)
    mono = monodromy(drive.replace_eps(eps_star), rtol=rtol, atol=atol)
    gap = mono.folded_gap
    if mono.defect >= EP_DEFECT_THRESHOLD and gap <= EP_GAP_FACTOR * eps_star:
        kind = "ep"
    elif gap <= 1e-8 * drive.omega0:
        kind = "crossing"
    else:
        kind = "avoided"
    return ResonanceScan(kind=kind, eps_star=float(eps_star), gap=float(gap),
                         defect=float(mono.defect), N=N)


def floquet_generator(mono: MonodromyResult) -> np.ndarray:
    """Effective static generator R with M = exp(-i R T).

    Built from the Schur form of M with a branch-aligned matrix logarithm
    (the naive principal logm is unstable exactly at an EP, where the
    defective eigenvalue sits on the log branch cut).  The global branch is
    shifted by an integer multiple of eps so the eigenvalues sit near
    +omega0/2, matching the convention in which the defective eigenvalue of
    the stroboscopic generator is the upper level.
    """
    T, Z = schur(mono.M, output="complex")
    l1, l2 = T[0, 0], T[1, 1]
    log1 = np.log(l1)
    log2 = np.log(l2)
    log2 += 2j * np.pi * np.round((log1 - log2).imag / (2.0 * np.pi))
    if abs(l1 - l2) > 1e-6 * max(abs(l1), abs(l2)):
        dd = (log1 - log2) / (l1 - l2)
    else:
        dd = 2.0 / (l1 + l2)
    logT = np.array([[log1, T[0, 1] * dd], [0.0, log2]])
    R = (1j * mono.eps / (2.0 * np.pi)) * (Z @ logT @ Z.conj().T)
    mean_mu = 0.5 * np.trace(R).real
    k = np.round((0.5 * mono.omega0 - mean_mu) / mono.eps)
    return R + k * mono.eps * np.eye(2)


def generalized_eigenvector(mono: MonodromyResult) -> np.ndarray:
    """Generalized eigenvector Q2 of the defective stroboscopic generator.

    Solves (R - omega0/2) Q2 = q2 in the least-squares sense, with q2 the
    surviving (level-2 dominant) eigenvector taken from the Schur basis.
    The minimal-norm solution is orthogonal to q2 and hence level-1
    dominant.  Requires a defective monodromy.
    """
    if not mono.is_defective:
        raise ContractViolationError(
            "monodromy is not defective (defect "
            f"{mono.defect:.6f}, folded gap {mono.folded_gap:.3e})"
        )
    R = floquet_generator(mono)
    _, Z = schur(mono.M, output="complex")
    q2 = Z[:, 0]
    # rank-deficient solve: the nilpotent part has one meaningful singular
    # value; the other is integration noise and must not be inverted
    Q2, *_ = np.linalg.lstsq(R - 0.5 * mono.omega0 * np.eye(2), q2, rcond=1e-6)
    return Q2


def ep_eigenvector(mono: MonodromyResult) -> np.ndarray:
    """The surviving eigenvector at (or near) a coalescence, from the Schur basis."""
    _, Z = schur(mono.M, output="complex")
    return Z[:, 0]


def map_c_to_a(c1: complex, c2: complex, omega0: float, t: float) -> np.ndarray:
    """Invert the interaction-picture substitution: a1 = c1 e^{i w0 t/2},
    a2 = -i c2 e^{-i w0 t/2}.  Magnitudes are preserved."""
    return np.array(
        [c1 * np.exp(0.5j * omega0 * t), -1j * c2 * np.exp(-0.5j * omega0 * t)]
    )


def map_a_to_c(a1: complex, a2: complex, omega0: float, t: float) -> np.ndarray:
    """Forward substitution: c1 = a1 e^{-i w0 t/2}, c2 = i a2 e^{i w0 t/2}."""
    return np.array(
        [a1 * np.exp(-0.5j * omega0 * t), 1j * a2 * np.exp(0.5j * omega0 * t)]
    )
