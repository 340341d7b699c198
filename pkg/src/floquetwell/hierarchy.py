"""Quasi-energies from the truncated Fourier-mode hierarchy.

Writing a Floquet solution as exp(-i mu t) * sum_n (A_n, B_n) exp(-i n eps t)
turns the two-level equations into coupled linear recurrences,

    (mu + n eps + w0/2) A_n = eps (V1 B_{n+1} + V2 B_{n-1})
    (mu + n eps - w0/2) B_n = eps (V1 A_{n+1} + V2 A_{n-1}),

i.e. an eigenproblem for mu on the truncated index range |n| <= N.  This is
an independent route to the quasi-energies, used to cross-validate the
monodromy.  The module also provides the gauge map that turns any drive with
a real positive coupling product into an equivalent Hermitian one, and the
closed-form coefficient recurrences for one-sided drives (V1 = 0), which
expose the exceptional points analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EigensolverError, NearSingularError, TruncationError
from .twolevel import DriveSpec

# Eigenvalues whose eigenvector carries more than this weight on the two
# outermost Fourier blocks are truncation artifacts: their missing couplings
# shift them off the two physical quasi-energy classes.
EDGE_MASS_LIMIT = 1e-18
DEDUP_TOL_FACTOR = 1e-8


@dataclass
class HierarchyMatrix:
    """Dense matrix of the truncated hierarchy, interleaved (A_n, B_n) layout."""

    n_trunc: int
    dim: int
    entries: np.ndarray
    drive: DriveSpec

    def index_A(self, n: int) -> int:
        return 2 * (n + self.n_trunc)

    def index_B(self, n: int) -> int:
        return 2 * (n + self.n_trunc) + 1

    @property
    def n_range(self) -> np.ndarray:
        return np.arange(-self.n_trunc, self.n_trunc + 1)


@dataclass
class QuasiEnergySolution:
    """One quasi-energy class representative from the hierarchy."""

    mu: float | complex
    vector: np.ndarray
    fourier_A: np.ndarray  # A_n for n in n_range
    fourier_B: np.ndarray
    n_range: np.ndarray
    multiplicity: int
    residual: float


@dataclass
class GaugeMap:
    """Hermitian-equivalent drive for a real positive coupling product."""

    gamma: float
    theta: complex
    drive: DriveSpec  # the equivalent Hermitian drive (Gamma, Gamma, w0, eps)


@dataclass
class ClosedFormCoefficients:
    """Fourier coefficients of one closed-form branch of a one-sided drive."""

    branch: str  # "mu1" | "mu2"
    mu: float
    A: np.ndarray  # index n = 0 .. n_max
    B: np.ndarray
    normalization: complex


def default_truncation(drive: DriveSpec) -> int:
    """Cutoff validated by the doubling-convergence test."""
    return 2 * int(np.ceil(drive.omega0 / drive.eps)) + 16


def build_matrix(drive: DriveSpec, n_trunc: int | None = None) -> HierarchyMatrix:
    """Assemble the truncated hierarchy as a standard eigenproblem in mu.

    Rows for A_n couple only to B_{n +- 1} and vice versa; the diagonal
    carries -(n eps +- w0/2).
    """
    if n_trunc is None:
        n_trunc = default_truncation(drive)
    min_trunc = int(np.ceil(drive.omega0 / drive.eps)) + 8
    if n_trunc < min_trunc:
        raise TruncationError(
            f"n_trunc = {n_trunc} below the required ceil(w0/eps) + 8 = {min_trunc}"
        )
    N = n_trunc
    dim = 2 * (2 * N + 1)
    H = np.zeros((dim, dim), dtype=complex)
    eps, w0 = drive.eps, drive.omega0
    mat = HierarchyMatrix(n_trunc=N, dim=dim, entries=H, drive=drive)
    for n in range(-N, N + 1):
        iA, iB = mat.index_A(n), mat.index_B(n)
        H[iA, iA] = -(n * eps + 0.5 * w0)
        H[iB, iB] = -(n * eps - 0.5 * w0)
        if n + 1 <= N:
            H[iA, mat.index_B(n + 1)] = eps * drive.V1
            H[iB, mat.index_A(n + 1)] = eps * drive.V1
        if n - 1 >= -N:
            H[iA, mat.index_B(n - 1)] = eps * drive.V2
            H[iB, mat.index_A(n - 1)] = eps * drive.V2
    return mat


def _fold_real(x: np.ndarray, eps: float) -> np.ndarray:
    return np.real(x) % eps


def _circular_dist(a, b, eps: float):
    d = np.abs(a - b)
    return np.minimum(d, eps - d)


def solve_quasi_energies(H: HierarchyMatrix) -> list[QuasiEnergySolution]:
    """Diagonalize the hierarchy and reduce to the two quasi-energy classes.

    The dense non-symmetric spectrum is filtered to eigenvectors that have
    converged inside the truncation window (negligible weight on the edge
    blocks), folded into [0, eps) and deduplicated.  Exactly two classes
    must remain; each representative is the best-converged eigenvector of
    its class and satisfies ||H v - mu v|| <= 1e-8 ||H||.
    """
    eps = H.drive.eps
    w, v = np.linalg.eig(H.entries)
    dim = H.dim
    edge = (
        np.sum(np.abs(v[:4, :]) ** 2, axis=0) + np.sum(np.abs(v[-4:, :]) ** 2, axis=0)
    ) / np.sum(np.abs(v) ** 2, axis=0)
    keep = np.where(edge < EDGE_MASS_LIMIT)[0]
    if keep.size < 2:
        raise TruncationError(
            "no interior-converged eigenvectors; increase n_trunc"
        )
    folded = _fold_real(w[keep], eps)
    order = np.argsort(folded)
    classes: list[list[int]] = []
    reps: list[float] = []
    tol = DEDUP_TOL_FACTOR * eps
    for idx in order:
        f = folded[idx]
        for ci, c in enumerate(reps):
            if _circular_dist(f, c, eps) <= tol:
                classes[ci].append(keep[idx])
                break
        else:
            classes.append([keep[idx]])
            reps.append(f)
    if len(classes) != 2:
        raise EigensolverError(
            f"expected 2 folded quasi-energy classes, found {len(classes)}"
        )
    hnorm = np.linalg.norm(H.entries, 2)
    out = []
    for ci, members in enumerate(classes):
        best = min(members, key=lambda i: edge[i])
        vec = v[:, best]
        res = float(np.linalg.norm(H.entries @ vec - w[best] * vec))
        if res > 1e-8 * hnorm:
            raise EigensolverError(
                f"eigenpair residual {res:.3e} exceeds 1e-8 ||H|| = {1e-8 * hnorm:.3e}"
            )
        mu = reps[ci]
        imag = float(np.max(np.abs(np.imag(w[members]))))
        mu_val: float | complex = float(mu) if imag < 1e-10 else mu + 1j * np.imag(w[best])
        A = vec[0::2]
        B = vec[1::2]
        out.append(
            QuasiEnergySolution(
                mu=mu_val,
                vector=vec,
                fourier_A=A,
                fourier_B=B,
                n_range=H.n_range,
                multiplicity=len(members),
                residual=res,
            )
        )
    out.sort(key=lambda s: np.real(s.mu))
    return out


def gauge_transform(drive: DriveSpec) -> GaugeMap:
    """Map a drive with real positive V1 V2 onto its Hermitian equivalent.

    With V1 = |V1| e^{i phi}, V2 = |V2| e^{-i phi}, the substitution
    A_n -> alpha_n e^{i theta n} with e^{i theta} = sqrt(|V2|/|V1|) e^{-i phi}
    turns the hierarchy into the one of the sinusoidal drive with amplitude
    Gamma = sqrt(|V1 V2|).  The quasi-energy spectrum is preserved exactly
    (similarity transform).  A negative real product is *not* gauge
    equivalent to a Hermitian drive and is rejected.
    """
    p = complex(drive.V1) * complex(drive.V2)
    if p == 0:
        raise DomainError("V1 V2 = 0: use closed_form_v1_zero instead")
    if abs(p.imag) > 1e-12 * abs(p) or p.real <= 0:
        raise DomainError(
            "gauge map requires a real positive coupling product V1*V2"
        )
    phi = np.angle(complex(drive.V1))
    gamma = float(np.sqrt(abs(p)))
    theta = -phi - 0.5j * np.log(abs(drive.V2) / abs(drive.V1))
    equivalent = DriveSpec(gamma, gamma, drive.omega0, drive.eps)
    return GaugeMap(gamma=gamma, theta=complex(theta), drive=equivalent)


def gauge_transform_coefficients(coeffs: np.ndarray, n_range: np.ndarray, theta: complex):
    """alpha_n = A_n e^{-i theta n} (same map applies to the B coefficients)."""
    return coeffs * np.exp(-1j * theta * n_range)


def closed_form_v1_zero(
    drive: DriveSpec, n_max: int
) -> tuple[ClosedFormCoefficients, ClosedFormCoefficients]:
    """Closed-form Fourier coefficients of both branches for V1 = 0.

    Branch mu1 = -w0/2:  A_0 = 1, A_n = eps V2^2 A_{n-2} / [n(-w0 + n eps - eps)]
    for even n, B_n = (n+1) A_{n+1} / V2 for odd n.  Branch mu2 = +w0/2 is the
    mirror with A and B exchanged and w0 -> -w0 in the denominator.  Both are
    normalized so the largest coefficient has unit modulus.  Near an odd
    resonance w0 ~ (2N-1) eps the branch-1 denominator at n = 2N collapses
    and the B_{2N-1}, A_{2N} pair dominates: the state flips to level-2
    dominance, which is the analytic signature of the exceptional point.
    """
    if drive.V1 != 0:
        raise DomainError("closed form requires V1 = 0")
    if drive.V2 == 0:
        raise DomainError("closed form requires V2 != 0")
    eps, w0, V2 = drive.eps, drive.omega0, complex(drive.V2)

    def branch(sign: float, label: str) -> ClosedFormCoefficients:
        # sign = +1 for the mu1 = -w0/2 branch (leading component A),
        # sign = -1 for mu2 = +w0/2 (leading component B).
        lead = np.zeros(n_max + 1, dtype=complex)
        lead[0] = 1.0
        for n in range(2, n_max + 1, 2):
            den = n * (-sign * w0 + n * eps - eps)
            if abs(den) < 1e-12:
                raise NearSingularError(
                    "closed-form denominator within rounding of zero", n
                )
            lead[n] = eps * V2 * V2 * lead[n - 2] / den
        other = np.zeros(n_max + 1, dtype=complex)
        for n in range(1, n_max, 2):
            other[n] = (n + 1) * lead[n + 1] / V2
        scale = max(np.max(np.abs(lead)), np.max(np.abs(other)))
        lead /= scale
        other /= scale
        if label == "mu1":
            return ClosedFormCoefficients(
                branch=label, mu=-0.5 * w0, A=lead, B=other, normalization=1.0 / scale
            )
        return ClosedFormCoefficients(
            branch=label, mu=+0.5 * w0, A=other, B=lead, normalization=1.0 / scale
        )

    return branch(+1.0, "mu1"), branch(-1.0, "mu2")


def hierarchy_residual(
    drive: DriveSpec, mu: complex, A: np.ndarray, B: np.ndarray, n_range: np.ndarray
) -> float:
    """Max residual of the hierarchy equations for given coefficients.

    Out-of-range coefficients are treated as zero, which is exact in the
    super-exponentially decaying tail.  Used as the substitution oracle for
    the closed forms and for cross-checking eigenvectors.
    """
    idx = {int(n): i for i, n in enumerate(n_range)}

    def get(arr, n):
        i = idx.get(n)
        return arr[i] if i is not None else 0.0

    eps, w0 = drive.eps, drive.omega0
    res = 0.0
    for n in n_range:
        n = int(n)
        rA = (mu + n * eps + 0.5 * w0) * get(A, n) - eps * (
            drive.V1 * get(B, n + 1) + drive.V2 * get(B, n - 1)
        )
        rB = (mu + n * eps - 0.5 * w0) * get(B, n) - eps * (
            drive.V1 * get(A, n + 1) + drive.V2 * get(A, n - 1)
        )
        res = max(res, abs(rA), abs(rB))
    return float(res)
