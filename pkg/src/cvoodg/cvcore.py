"""Fock-space and Gaussian-moment numerics for one bosonic mode.

Conventions fixed once, here:
  * hbar = 2, so a coherent state |r e^{i phi}> has first moments
    q = (2 r cos phi, 2 r sin phi) and covariance V = I.
  * Trace norm ||.|| is the sum of absolute eigenvalues; density-matrix
    differences therefore range over [0, 2].

Covers Gaussian channel action and output fidelity, coherent-state Fock
vectors, trace distance, the Fock-element P-representations of the additive
noise (Gaussian convolution) channel, its overlap coefficients, and energy
truncation. All values are immutable after construction and all operations
are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import specfun

__all__ = [
    "OMEGA",
    "DegenerateInputError",
    "QuadratureError",
    "GaussianChannel",
    "GaussianMoments",
    "coherent_moments",
    "FockMatrix",
    "OffDiagLabel",
    "apply_gaussian",
    "gaussian_output_fidelity_sq",
    "coherent_fock_vector",
    "suggested_coherent_dim",
    "trace_distance",
    "p_rep_fock_element",
    "p_rep_radial",
    "gamma_overlap",
    "additive_noise_apply",
    "delta_s_bound",
    "truncate_energy",
    "mean_photon_number",
    "rotation_channel",
    "displacement_channel",
    "squeezing_channel",
    "loss_channel",
]

#: Symplectic form for a single mode.
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])

_SYM_TOL = 1e-12
_PSD_TOL = 1e-10


class DegenerateInputError(ValueError):
    """A Gaussian fidelity evaluation hit a singular covariance combination."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


def _as_matrix(x, shape) -> np.ndarray:
    arr = np.array(x, dtype=float, copy=True)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    return arr


@dataclass(frozen=True)
class GaussianChannel:
    """One-mode Gaussian channel (d, M, N): q -> M q + d, V -> M V M^T + N."""

    d: np.ndarray
    M: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d", _as_matrix(self.d, (2,)))
        object.__setattr__(self, "M", _as_matrix(self.M, (2, 2)))
        object.__setattr__(self, "N", _as_matrix(self.N, (2, 2)))
        if not np.allclose(self.N, self.N.T, atol=_SYM_TOL, rtol=0.0):
            raise ValueError("noise matrix N must be symmetric")
        if np.linalg.eigvalsh(self.N).min() < -_PSD_TOL:
            raise ValueError("noise matrix N must be positive semidefinite")
        det_n = float(np.linalg.det(self.N))
        det_m = float(np.linalg.det(self.M))
        if det_n < (det_m - 1.0) ** 2 - _SYM_TOL:
            raise ValueError(
                f"channel violates det N >= (det M - 1)^2: "
                f"det N = {det_n:.3e}, (det M - 1)^2 = {(det_m - 1.0) ** 2:.3e}"
            )


@dataclass(frozen=True)
class GaussianMoments:
    """First moments q and covariance V of a Gaussian state (hbar = 2)."""

    q: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _as_matrix(self.q, (2,)))
        object.__setattr__(self, "V", _as_matrix(self.V, (2, 2)))
        if not np.allclose(self.V, self.V.T, atol=_SYM_TOL, rtol=0.0):
            raise ValueError("covariance must be symmetric")
        # Uncertainty relation: V + i*Omega >= 0.
        eigs = np.linalg.eigvalsh(self.V.astype(complex) + 1j * OMEGA)
        if eigs.min() < -_PSD_TOL:
            raise ValueError(f"covariance violates V + i*Omega >= 0 (min eig {eigs.min():.3e})")


def coherent_moments(r: float, phi: float = 0.0) -> GaussianMoments:
    """Moments of the coherent state |r e^{i phi}>."""
    return GaussianMoments(
        q=np.array([2.0 * r * math.cos(phi), 2.0 * r * math.sin(phi)]),
        V=np.eye(2),
    )


@dataclass(frozen=True)
class FockMatrix:
    """Finite-dimensional Hermitian operator in the Fock basis.

    Trace in [0, 1 + tol] (sub-normalized states come out of truncation) and
    eigenvalues above -1e-10.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"entries must be a square matrix, got shape {arr.shape}")
        if not np.allclose(arr, arr.conj().T, atol=_SYM_TOL, rtol=0.0):
            raise ValueError("Fock matrix must be Hermitian")
        tr = float(np.real(np.trace(arr)))
        if tr < -_SYM_TOL or tr > 1.0 + 1e-12:
            raise ValueError(f"trace {tr} outside [0, 1]")
        if np.linalg.eigvalsh(arr).min() < -_PSD_TOL:
            raise ValueError("Fock matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


@dataclass(frozen=True)
class OffDiagLabel:
    """Label (m, n, theta) of the symmetrized Fock element
    (e^{i theta} |m><n| + e^{-i theta} |n><m|) / 2; m = n is the diagonal case.
    """

    m: int
    n: int
    theta: float = 0.0

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("Fock indices must be non-negative")

    def canonical(self) -> "OffDiagLabel":
        """Equivalent label with m >= n (theta flips sign under the swap)."""
        if self.m >= self.n:
            return self
        return OffDiagLabel(self.n, self.m, -self.theta)


def _as_label(label_or_m) -> OffDiagLabel:
    if isinstance(label_or_m, OffDiagLabel):
        return label_or_m.canonical()
    m = int(label_or_m)
    return OffDiagLabel(m, m, 0.0)


# ---------------------------------------------------------------------------
# Gaussian channel action and fidelity
# ---------------------------------------------------------------------------

def apply_gaussian(channel: GaussianChannel, moments: GaussianMoments) -> GaussianMoments:
    """q -> M q + d, V -> M V M^T + N."""
    q = channel.M @ moments.q + channel.d
    V = channel.M @ moments.V @ channel.M.T + channel.N
    return GaussianMoments(q=q, V=V)


def gaussian_output_fidelity_sq(
    c1: GaussianChannel, c2: GaussianChannel, r: float, phi: float = 0.0
) -> float:
    """Squared fidelity of the two channel outputs on input |r e^{i phi}>.

    F^2 = 2 exp(-mu^T (V1+V2)^{-1} mu / 2) / (sqrt(Delta + delta) - sqrt(delta))
    with mu = (M2 - M1) q + (d2 - d1), V_i = M_i M_i^T + N_i,
    delta = (det V1 - 1)(det V2 - 1), Delta = det(V1 + V2).
    """
    if r < 0.0:
        raise ValueError("amplitude r must be non-negative")
    q = np.array([2.0 * r * math.cos(phi), 2.0 * r * math.sin(phi)])
    v1 = c1.M @ c1.M.T + c1.N
    v2 = c2.M @ c2.M.T + c2.N
    mu = (c2.M - c1.M) @ q + (c2.d - c1.d)
    vsum = v1 + v2
    det_sum = float(np.linalg.det(vsum))
    if det_sum <= _SYM_TOL:
        raise DegenerateInputError("V1 + V2 is singular")
    delta = max((float(np.linalg.det(v1)) - 1.0) * (float(np.linalg.det(v2)) - 1.0), 0.0)
    exponent = -0.5 * float(mu @ np.linalg.solve(vsum, mu))
    denom = math.sqrt(det_sum + delta) - math.sqrt(delta)
    f2 = 2.0 * math.exp(exponent) / denom
    if f2 > 1.0 + 1e-12:
        raise ValueError(f"fidelity^2 = {f2} exceeds 1 beyond tolerance")
    return min(max(f2, 0.0), 1.0)


def rotation_channel(theta: float) -> GaussianChannel:
    c, s = math.cos(theta), math.sin(theta)
    return GaussianChannel(d=np.zeros(2), M=np.array([[c, -s], [s, c]]), N=np.zeros((2, 2)))


def displacement_channel(d: np.ndarray) -> GaussianChannel:
    return GaussianChannel(d=np.asarray(d, dtype=float), M=np.eye(2), N=np.zeros((2, 2)))


def squeezing_channel(s: float) -> GaussianChannel:
    return GaussianChannel(
        d=np.zeros(2), M=np.diag([math.exp(s), math.exp(-s)]), N=np.zeros((2, 2))
    )


def loss_channel(eta: float) -> GaussianChannel:
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    return GaussianChannel(
        d=np.zeros(2), M=math.sqrt(eta) * np.eye(2), N=(1.0 - eta) * np.eye(2)
    )


# ---------------------------------------------------------------------------
# Fock-space basics
# ---------------------------------------------------------------------------

def suggested_coherent_dim(alpha: complex) -> int:
    """Truncation dimension with Poisson tail below ~1e-8 at desk scale."""
    return int(math.ceil(4.0 * (abs(alpha) ** 2 + 1.0))) + 10


def coherent_fock_vector(alpha: complex, dim: int) -> np.ndarray:
    """Fock amplitudes e^{-|alpha|^2/2} alpha^m / sqrt(m!) for m < dim.

    The caller picks dim large enough that the dropped Poisson tail is
    negligible; suggested_coherent_dim gives a safe default.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    a2 = abs(alpha) ** 2
    out = np.zeros(dim, dtype=complex)
    out[0] = 1.0
    for m in range(1, dim):
        out[m] = out[m - 1] * alpha / math.sqrt(m)
    return out * math.exp(-a2 / 2.0)


def trace_distance(rho: FockMatrix, sigma: FockMatrix) -> float:
    """Sum of absolute eigenvalues of rho - sigma (range [0, 2])."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    eigs = np.linalg.eigvalsh(rho.entries - sigma.entries)
    return float(np.sum(np.abs(eigs)))


def mean_photon_number(rho: FockMatrix) -> float:
    """Sum_m m <m|rho|m> (not normalized by the trace)."""
    diag = np.real(np.diag(rho.entries))
    return float(np.dot(np.arange(rho.dim), diag))


def truncate_energy(rho: FockMatrix, M: int) -> tuple[FockMatrix, float]:
    """Zero every row/column with index >= M; the dropped weight is treated
    as an erasure sector and tracked only through eta_M = trace of the result.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    if M > rho.dim:
        raise ValueError(f"M = {M} exceeds the matrix dimension {rho.dim}")
    out = np.zeros_like(rho.entries)
    out[:M, :M] = rho.entries[:M, :M]
    eta = float(np.real(np.trace(out)))
    return FockMatrix(out), eta


# ---------------------------------------------------------------------------
# P-representations of convolved Fock elements
# ---------------------------------------------------------------------------

def p_rep_radial(label_or_m, s: float, r: float) -> float:
    """Radial factor of the element's smoothed P-representation P_s.

    Diagonal (m, m): the full value (no angular dependence),
        (-1)^m / pi * (1-s)^m / s^(m+1) * exp(-r^2/s) * L_m[r^2 / (s(1-s))].
    Off-diagonal (m, n), m > n: the factor multiplying cos(theta - (m-n) phi),
        (-1)^n / pi * sqrt(n!/m!) * (1-s)^n / s^(m+1) * exp(-r^2/s)
        * r^(m-n) * L_n^(m-n)[r^2 / (s(1-s))].
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"noise parameter s must lie in (0, 1), got {s}")
    if r < 0.0:
        raise ValueError("radius must be non-negative")
    lab = _as_label(label_or_m)
    m, n = lab.m, lab.n
    delta = m - n
    x = r * r / (s * (1.0 - s))
    lag = specfun.laguerre(n, float(delta), x)
    if lag == 0.0:
        return 0.0
    log_pref = (
        0.5 * (specfun.log_factorial(n) - specfun.log_factorial(m))
        - math.log(math.pi)
        + n * math.log1p(-s)
        - (m + 1) * math.log(s)
        - r * r / s
    )
    if r > 0.0:
        log_pref += delta * math.log(r)
    elif delta > 0:
        return 0.0
    sign = -1.0 if n % 2 else 1.0
    return sign * math.copysign(math.exp(log_pref + math.log(abs(lag))), lag)


def p_rep_fock_element(label_or_m, s: float, r: float, phi: float = 0.0) -> float:
    """Value of P_s at r e^{i phi} for a (symmetrized) Fock element."""
    lab = _as_label(label_or_m)
    radial = p_rep_radial(lab, s, r)
    if lab.m == lab.n:
        return radial
    return math.cos(lab.theta - (lab.m - lab.n) * phi) * radial


def _log_overlap_poly(m1: int, m2: int, delta: int, s: float) -> float:
    """log of the positive polynomial
    G[m1, m2, Delta, s] = sum_k C(n1, k) n2!/(n2-k)! Delta!/(Delta+k)! s^{2(n1-k)}
    with n_i = m_i - Delta and m2 >= m1 >= Delta. All terms positive.
    """
    n1 = m1 - delta
    n2 = m2 - delta
    lf = specfun.log_factorial
    log_s = math.log(s) if s > 0.0 else -math.inf
    logs = []
    for k in range(n1 + 1):
        term = (
            lf(n1) - lf(k) - lf(n1 - k)
            + lf(n2) - lf(n2 - k)
            + lf(delta) - lf(delta + k)
        )
        if n1 - k > 0:
            term += 2.0 * (n1 - k) * log_s
        logs.append(term)
    peak = max(logs)
    return peak + math.log(sum(math.exp(t - peak) for t in logs))


def gamma_overlap(label1, label2, s: float) -> float:
    """Overlap coefficient gamma_s = pi * integral of P_s[element1] * Q[element2].

    Vanishes unless |m1 - n1| = |m2 - n2|; otherwise given in closed form by
    the positive-coefficient polynomial G (evaluated in log space).
    """
    if not 0.0 < s < 0.5:
        raise ValueError(f"gamma_overlap requires s in (0, 1/2), got {s}")
    l1 = _as_label(label1)
    l2 = _as_label(label2)
    d1 = l1.m - l1.n
    d2 = l2.m - l2.n
    if d1 != d2:
        return 0.0
    delta = d1
    # Symmetric under swapping the two labels; order so m2 >= m1.
    (m1, t1), (m2, t2) = sorted([(l1.m, l1.theta), (l2.m, l2.theta)])
    log_g = _log_overlap_poly(m1, m2, delta, s)
    log_core = (m2 - m1) * (math.log(s) if s > 0 else -math.inf)
    if m2 == m1:
        log_core = 0.0
    log_core += log_g - (m1 + m2 + 1 - delta) * math.log1p(s)
    if delta == 0:
        return math.exp(log_core)
    lf = specfun.log_factorial
    log_binoms = 0.5 * (
        lf(m1) - lf(delta) - lf(m1 - delta) + lf(m2) - lf(delta) - lf(m2 - delta)
    )
    return 0.5 * math.cos(t1 - t2) * math.exp(log_binoms + log_core)


# ---------------------------------------------------------------------------
# Additive noise channel C_s
# ---------------------------------------------------------------------------

def _cs_element_bound_log(m: int, n: int, j: int, k: int, s: float) -> tuple[float, float]:
    """(log coefficient magnitude, log termwise bound on the element).

    After substituting u = r^2/s, the element factorizes as
        <j|C_s(|m><n|)|k> = (-1)^n sqrt(n!/(m! j! k!)) (1-s)^n s^(k-n) * U,
        U = integral_0^inf u^p e^{-(1+s)u} L_n^Delta(u/(1-s)) du,  p = k+Delta,
    so the u-integrand is scale-free. Expanding |L| termwise bounds |U| by a
    positive sum of gamma moments; the coefficient times that sum bounds the
    element and measures how much cancellation the quadrature must resolve.
    """
    delta = m - n
    p = k + delta
    lf = specfun.log_factorial
    log_coeff = (
        0.5 * (lf(n) - lf(m) - lf(j) - lf(k))
        + n * math.log1p(-s)
        + (k - n) * math.log(s)
    )
    log_b = -math.log1p(-s)  # log of the Laguerre argument scale 1/(1-s)
    terms = []
    for i in range(n + 1):
        terms.append(
            lf(n + delta) - lf(n - i) - lf(delta + i)  # log binom(n+Delta, n-i)
            - lf(i)
            + i * log_b
            + lf(p + i)
            - (p + i + 1) * math.log1p(s)
        )
    peak = max(terms)
    log_u_abs = peak + math.log(sum(math.exp(t - peak) for t in terms))
    return log_coeff, log_coeff + log_u_abs


def _cs_matrix_element(m: int, n: int, j: int, k: int, s: float) -> tuple[float, float]:
    """<j| C_s(|m><n|) |k> for m >= n, j - k = m - n, by radial quadrature.

    The angular integral is analytic (2 pi delta_{j-k, m-n}); the radial
    quadrature runs in the substituted variable u = r^2/s so the integrand
    is well-scaled for every s. Elements whose certified termwise bound is
    negligible are skipped; elements whose cancellation exceeds double
    precision are integrated at escalated precision. Returns
    (value, error estimate).
    """
    delta = m - n
    p = k + delta
    a = 1.0 + s
    b = 1.0 / (1.0 - s)
    sign = -1.0 if n % 2 else 1.0
    log_coeff, log_bound = _cs_element_bound_log(m, n, j, k, s)
    if log_bound < math.log(1e-15):
        return 0.0, math.exp(log_bound)

    # Effective decay of |integrand| including the Szegő e^{x/2} headroom.
    a_eff = a - 0.5 * b
    u_max = (p + 80.0 + 8.0 * math.sqrt(p + 1.0)) / a_eff
    u_peak = max(p / a, 1e-3)

    if log_bound <= math.log(100.0):
        def integrand(u: float) -> float:
            if u <= 0.0:
                return 0.0
            lag = specfun.laguerre(n, float(delta), b * u)
            if lag == 0.0:
                return 0.0
            mag = math.exp(log_coeff + p * math.log(u) - a * u + math.log(abs(lag)))
            return sign * math.copysign(mag, lag)

        val, err = integrate.quad(
            integrand, 0.0, u_max, points=[u_peak], limit=400,
            epsabs=1e-13, epsrel=1e-11,
        )
        return val, err

    # Cancellation beyond double precision: adaptive quadrature cannot see
    # the value through the integrand's magnitude, so escalate the working
    # precision and integrate the Laguerre monomials termwise (each term is
    # an exact gamma moment of the same radial integral).
    import mpmath as mp

    digits = 20 + max(0, int(log_bound / math.log(10.0)))
    with mp.workdps(digits):
        s_mp = mp.mpf(s)
        a_mp = 1 + s_mp
        b_mp = 1 / (1 - s_mp)
        coeff = (
            mp.mpf(sign)
            * mp.sqrt(mp.factorial(n) / (mp.factorial(m) * mp.factorial(j) * mp.factorial(k)))
            * (1 - s_mp) ** n
            * s_mp ** (k - n)
        )
        u_val = mp.mpf(0)
        for i in range(n + 1):
            term = (
                mp.binomial(n + delta, n - i)
                * b_mp**i
                / mp.factorial(i)
                * mp.factorial(p + i)
                / a_mp ** (p + i + 1)
            )
            u_val += term if i % 2 == 0 else -term
        val = float(coeff * u_val)
    return val, abs(val) * 1e-15 + 1e-18


def additive_noise_apply(rho: FockMatrix, s: float, out_dim: int) -> FockMatrix:
    """Apply the Gaussian additive-noise channel C_s and re-express in a
    Fock basis of dimension out_dim.

    Matrix elements are reconstructed by radial quadrature of P_s against
    coherent projectors; the angular integral is analytic, so an input
    element |m><n| only feeds output elements with j - k = m - n.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"noise parameter s must lie in (0, 1), got {s}")
    if out_dim < 1:
        raise ValueError("out_dim must be positive")
    src = rho.entries
    out = np.zeros((out_dim, out_dim), dtype=complex)
    total_err = 0.0
    for m in range(rho.dim):
        for n in range(m + 1):
            amp = src[m, n]
            if abs(amp) < 1e-18:
                continue
            delta = m - n
            for k in range(out_dim - delta):
                j = k + delta
                val, err = _cs_matrix_element(m, n, j, k, s)
                total_err += abs(err)
                if err > 1e-7:
                    raise QuadratureError(
                        f"additive_noise_apply element (m={m}, n={n}, j={j}, k={k}) "
                        "did not converge",
                        err,
                    )
                out[j, k] += amp * val
                if delta > 0:
                    out[k, j] += np.conj(amp) * val
    # Hermitize away quadrature round-off. The exact truncated output is a
    # principal submatrix of a PSD operator, so any negative eigenvalue is
    # quadrature noise; it is never clamped (trace distances must see it).
    out = 0.5 * (out + out.conj().T)
    if np.linalg.eigvalsh(out).min() < -_PSD_TOL:
        raise QuadratureError(
            "additive_noise_apply accumulated quadrature noise beyond the "
            "positivity tolerance",
            total_err,
        )
    return FockMatrix(out)


def delta_s_bound(nbar: float, s: float) -> float:
    """Distance bound 2 sqrt(s (1 + 2 nbar)) between a state of mean photon
    number nbar and its additive-noise image C_s."""
    if nbar < 0.0:
        raise ValueError("mean photon number must be non-negative")
    if not 0.0 <= s < 1.0:
        raise ValueError(f"noise parameter s must lie in [0, 1), got {s}")
    return 2.0 * math.sqrt(s * (1.0 + 2.0 * nbar))
