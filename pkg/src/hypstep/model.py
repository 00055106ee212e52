"""Hyperbolic step potential and its exact solutions.

Units are fixed to ``hbar**2 / (2 m) = 1`` throughout, so energies are
squared momenta and ``lambda**2 = V0 * alpha**2``.

The general solution is written in the variable ``y = 1 / (1 + exp(x/alpha))``
as::

    psi = (1-y)**mu * [C y**nu     F(mu+nu, mu+nu+1; 1+2nu; y)
                     + D y**(-nu)  F(mu-nu, mu-nu+1; 1-2nu; y)]

with ``mu = i alpha k`` and ``nu = -i alpha k'``. No extra constant
prefactors are carried, so ``C`` and ``D`` are exactly the amplitudes of
``exp(+i k' x)`` and ``exp(-i k' x)`` as ``x -> +inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._exppoly import ExpPoly
from .errors import BranchPointError, DomainError, InadmissibleIndexError, NodeError
from .specfun import gamma_ratio, hyp2f1_pair

__all__ = [
    "PotentialParams",
    "ModeParameters",
    "SolutionCoefficients",
    "potential",
    "transmitted_momentum",
    "mode_parameters",
    "wavefunction",
    "asymptotic_left_coefficients",
    "solution_coefficients",
    "is_admissible_index",
    "antibound_momenta",
    "antibound_seed",
    "antibound_wavefunction",
]

# relative margin used to decide n > lambda when lambda is (numerically) an integer
_ADMISSIBLE_TOL = 1e-12


@dataclass(frozen=True)
class PotentialParams:
    """Barrier height ``V0`` and width ``alpha`` of the smooth step.

    ``V0 = 0`` is accepted and describes a free particle.
    """

    V0: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.V0) and self.V0 >= 0.0):
            raise DomainError(f"V0 must be finite and non-negative, got {self.V0}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"alpha must be finite and positive, got {self.alpha}")

    @property
    def lam(self) -> float:
        """Dimensionless strength ``lambda = alpha * sqrt(V0)``."""
        return self.alpha * math.sqrt(self.V0)

    @property
    def lam2(self) -> float:
        """``lambda**2 = alpha**2 V0``, formed without a square root."""
        return self.alpha * self.alpha * self.V0

    @property
    def threshold(self) -> float:
        """Threshold momentum ``sqrt(V0)``."""
        return math.sqrt(self.V0)


@dataclass(frozen=True)
class ModeParameters:
    mu: complex
    nu: complex


@dataclass(frozen=True)
class SolutionCoefficients:
    """Right (``C``, ``D``) and left (``A``, ``B``) asymptotic amplitudes."""

    C: complex
    D: complex
    A: complex
    B: complex


def potential(x, p: PotentialParams):
    """``V(x) = (V0/2) (1 + tanh(x / 2 alpha))``, evaluated as ``V0 * expit(x/alpha)``."""
    return p.V0 * expit(np.asarray(x, dtype=float) / p.alpha)


def transmitted_momentum(k, p: PotentialParams):
    """``k' = sqrt(k + sqrt(V0)) * sqrt(k - sqrt(V0))`` on principal branches.

    Real input is promoted to complex with ``+0`` imaginary part, so below
    threshold ``k'`` lies on the positive imaginary axis.

    Raises
    ------
    BranchPointError
        If ``k = +-sqrt(V0)`` with ``V0 > 0``.
    """
    k_arr = np.asarray(k, dtype=complex)
    if p.V0 == 0.0:
        out = k_arr.copy()
    else:
        q = p.threshold
        if np.any((k_arr == q) | (k_arr == -q)):
            raise BranchPointError(f"k = +-{q} is a branch point of k'(k)")
        out = np.sqrt(k_arr + q) * np.sqrt(k_arr - q)
    return complex(out) if out.ndim == 0 else out


def mode_parameters(k, p: PotentialParams) -> ModeParameters:
    kp = transmitted_momentum(k, p)
    return ModeParameters(mu=1j * p.alpha * complex(k), nu=-1j * p.alpha * kp)


def _log_y_pair(x, alpha):
    # log y and log(1 - y) without overflow or cancellation
    u = np.asarray(x, dtype=float) / alpha
    return -np.logaddexp(0.0, u), -np.logaddexp(0.0, -u), expit(-u), expit(u)


def wavefunction(x, k, C, D, p: PotentialParams):
    """Exact solution with right-asymptotic amplitudes ``C`` and ``D``.

    Parameters
    ----------
    x : array_like
        Positions.
    k : complex
        Incident momentum (``E = k**2``).
    C, D : complex
        Coefficients of ``exp(+i k' x)`` and ``exp(-i k' x)`` at ``x -> +inf``.

    Returns
    -------
    complex or ndarray of complex
    """
    x_arr = np.asarray(x, dtype=float)
    m = mode_parameters(k, p)
    mu, nu = m.mu, m.nu
    log_y, log_w, y, w = _log_y_pair(x_arr, p.alpha)
    psi = np.zeros(x_arr.shape, dtype=complex)
    if C != 0:
        f = hyp2f1_pair(mu + nu, mu + nu + 1.0, 1.0 + 2.0 * nu, y, w)
        psi = psi + C * np.exp(mu * log_w + nu * log_y) * f
    if D != 0:
        f = hyp2f1_pair(mu - nu, mu - nu + 1.0, 1.0 - 2.0 * nu, y, w)
        psi = psi + D * np.exp(mu * log_w - nu * log_y) * f
    return complex(psi) if psi.ndim == 0 else psi


def _left_factors(mu, nu):
    g1 = gamma_ratio([1.0 + 2.0 * nu, -2.0 * mu], [1.0 + nu - mu, nu - mu])
    g2 = gamma_ratio([1.0 + 2.0 * nu, 2.0 * mu], [mu + nu, mu + nu + 1.0])
    return g1, g2


def asymptotic_left_coefficients(C, D, k, p: PotentialParams):
    """Left amplitudes ``(A, B)`` of ``exp(+ikx)`` and ``exp(-ikx)`` at ``x -> -inf``.

    Raises
    ------
    GammaPoleError
        At ``k = 0`` or wherever a numerator Gamma hits a pole.
    """
    m = mode_parameters(k, p)
    g1, g2 = _left_factors(m.mu, m.nu)
    A, B = C * g1, C * g2
    if D != 0:
        h1, h2 = _left_factors(m.mu, -m.nu)
        A, B = A + D * h1, B + D * h2
    return complex(A), complex(B)


def solution_coefficients(C, D, k, p: PotentialParams) -> SolutionCoefficients:
    A, B = asymptotic_left_coefficients(C, D, k, p)
    return SolutionCoefficients(C=complex(C), D=complex(D), A=A, B=B)


def is_admissible_index(n: int, p: PotentialParams) -> bool:
    """True iff ``n > lambda`` (``k(n)`` is a genuine S-matrix pole)."""
    return n >= 1 and (n * n - p.lam2) > _ADMISSIBLE_TOL * n * n


def antibound_momenta(n: int, p: PotentialParams):
    """``(k(n), k'(n))`` on the negative imaginary axis (no admissibility check)."""
    lam2 = p.lam2
    # "+ 0.0" maps -0.0 to +0.0 so that k(n) = 0 lands on the upper lip of the cut
    k = complex(0.0, -0.5 * (n * n - lam2) / (n * p.alpha) + 0.0)
    kp = complex(0.0, -0.5 * (n * n + lam2) / (n * p.alpha))
    return k, kp


def antibound_seed(n: int, p: PotentialParams) -> ExpPoly:
    """Anti-bound wavefunction ``n`` as an exponential polynomial, normalised to 1 at x = 0.

    At ``k = k(n)`` the hypergeometric series terminates, and the solution is
    ``exp(-mu_n x/alpha) * sum_j c_j (1 + e^{x/alpha})**(n-j)`` with
    ``mu_n = (n - lambda**2/n) / 2`` and ``c_j = (1-n)_j (-n)_j / ((c)_j j!)``,
    ``c = 1 - n - lambda**2/n``.

    Raises
    ------
    InadmissibleIndexError
        If ``n <= lambda``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InadmissibleIndexError(f"anti-bound index must be a positive integer, got {n!r}")
    if not is_admissible_index(n, p):
        raise InadmissibleIndexError(f"n = {n} is not above lambda = {p.lam:.12g}")
    lam2 = p.lam2
    mu = 0.5 * (n - lam2 / n)
    c = 1.0 - n - lam2 / n
    poly = np.zeros(n + 1)
    cj = 1.0
    for j in range(n):
        # c_j (1 + s)^(n - j) expanded in powers of s
        deg = n - j
        poly[: deg + 1] += cj * np.array([math.comb(deg, i) for i in range(deg + 1)], dtype=float)
        cj *= (1.0 - n + j) * (-n + j) / ((c + j) * (j + 1.0))
    seed = ExpPoly(-mu, poly, p.alpha)
    at_zero = float(np.sum(poly))
    if at_zero == 0.0:
        raise NodeError(f"anti-bound state {n} vanishes at x = 0")
    return seed.scaled(1.0 / at_zero)


def antibound_wavefunction(n: int, x, p: PotentialParams):
    """Real anti-bound wavefunction ``n`` at positions ``x`` (value 1 at x = 0)."""
    out = antibound_seed(n, p)(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out
