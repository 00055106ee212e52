"""Scattering phases, Wigner time delays and classical time delays.

Phases are unwrapped along an ascending momentum grid and anchored at the
largest grid momentum, where the principal value is kept. The Wigner delay
is ``tau = (1/k) d delta / dk``, computed either from digamma values or by
finite differences on the unwrapped curve.

Classical delays integrate ``dx / v`` with ``v = 2 sqrt(E - V(x))``
(``hbar = 2m = 1``), against the free references ``d/k`` (reflection) and
``d/(2k') + d/(2k)`` (transmission).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import expit, logit

from .errors import DomainError, ThresholdError, UnwrapAmbiguityError
from .model import PotentialParams, potential
from .scattering import (
    dlog_reflection_dk,
    dlog_transmission_dk,
    log_reflection,
    log_transmission,
    transmitted_momentum,
)
from .susy import asymptotic_superpotentials, partner_amplitudes, partner_dlog_factors

__all__ = [
    "PhaseCurve",
    "DelayCurve",
    "ClassicalDelayResult",
    "PhaseTotal",
    "phase_curve",
    "continuous_phase",
    "phase_limits",
    "phase_total_variation",
    "wigner_delay",
    "wigner_delay_at",
    "classical_turning_point",
    "classical_primitive",
    "alternative_primitive",
    "classical_traversal_time",
    "classical_delays",
]

KINDS = ("reflection", "transmission")
GRID_THRESHOLD_EXCLUSION = 1e-6
DELAY_THRESHOLD_WINDOW = 0.05
UNWRAP_LIMIT = 0.9 * math.pi
# V(-d) < 1e-12 V0 requires d > 27.7 alpha
MIN_D_FACTOR = -logit(1e-12)
DEFAULT_D_FACTOR = 40.0
D_DOUBLING_TOL = 1e-6


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


@dataclass(frozen=True)
class PhaseCurve:
    k_grid: np.ndarray
    delta: np.ndarray
    kind: str
    chain_order: int
    params: PotentialParams

    @property
    def total_variation(self) -> float:
        return float(self.delta[-1] - self.delta[0])

    def max_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.delta)))) if self.delta.size > 1 else 0.0


@dataclass(frozen=True)
class DelayCurve:
    """Wigner delay; ``tau`` is NaN where ``threshold_flag`` is set."""

    k_grid: np.ndarray
    tau: np.ndarray
    kind: str
    chain_order: int
    threshold_flag: np.ndarray
    route: str


def _validate_grid(k_grid, p):
    k = np.asarray(k_grid, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise DomainError("momentum grid needs at least two points")
    if np.any(np.diff(k) <= 0) or k[0] <= 0:
        raise DomainError("momentum grid must be positive and strictly ascending")
    if p.V0 > 0 and np.any(np.abs(k - p.threshold) < GRID_THRESHOLD_EXCLUSION):
        raise ThresholdError(f"grid must exclude sqrt(V0) +- {GRID_THRESHOLD_EXCLUSION}")
    return k


def _amplitude(kind, order, k, p):
    r, t = partner_amplitudes(k, order, p)
    return r if kind == "reflection" else t


def phase_curve(kind: str, chain_order: int, k_grid, p: PotentialParams) -> PhaseCurve:
    """Unwrapped phase of ``r`` or ``t`` for the partner of the given order.

    Raises
    ------
    UnwrapAmbiguityError
        If two adjacent principal phases differ (mod ``2 pi``) by more
        than ``0.9 pi``; refine the grid.
    """
    _check_kind(kind)
    k = _validate_grid(k_grid, p)
    principal = np.angle(_amplitude(kind, chain_order, k, p))
    step = np.angle(np.exp(1j * np.diff(principal)))
    if np.any(np.abs(step) > UNWRAP_LIMIT):
        i = int(np.argmax(np.abs(step)))
        raise UnwrapAmbiguityError(
            f"phase jump {step[i]:.3f} rad between k = {k[i]:.6g} and {k[i + 1]:.6g}"
        )
    # anchor at the largest k: accumulate increments backwards from the principal value there
    delta = principal[-1] - np.concatenate([np.cumsum(step[::-1])[::-1], [0.0]])
    return PhaseCurve(k, delta, kind, int(chain_order), p)


def continuous_phase(kind: str, chain_order: int, k, p: PotentialParams):
    """A branch of the phase that is continuous on ``k > 0``.

    For the base potential this is the imaginary part of the sum of
    principal log-Gamma values; partner factors add ``-2 arctan(k/W^-)``
    (reflection) or ``arg(ik' + W^+) - arctan(k/W^-)`` (transmission).
    """
    _check_kind(kind)
    k = np.asarray(k, dtype=float)
    if kind == "reflection":
        base = np.imag(log_reflection(k, p))
    else:
        base = np.imag(log_transmission(k, p))
    extra = np.zeros_like(k)
    kp = np.sqrt(np.maximum(k * k - p.V0, 0.0))
    for s in range(1, chain_order + 1):
        w_minus, w_plus = asymptotic_superpotentials(s, p)
        if kind == "reflection":
            extra = extra - 2.0 * np.arctan(k / w_minus)
        else:
            arg_plus = np.where(kp > 0, 0.5 * np.pi + np.arctan(-w_plus / np.where(kp > 0, kp, 1.0)), np.pi)
            extra = extra + arg_plus - np.arctan(k / w_minus)
    out = base + extra
    return float(out) if out.ndim == 0 else out


def phase_limits(kind: str, chain_order: int, p: PotentialParams) -> tuple[float, float]:
    """Limits of :func:`continuous_phase` at ``k -> 0+`` and ``k -> inf``.

    The base reflection phase tends to ``-pi`` (``r -> -1``) and 0, the base
    transmission phase to ``-pi/2`` and 0 (``V0 > 0``). Every reflection
    factor moves from 0 to ``-pi``; every transmission factor from ``pi`` to 0.
    """
    _check_kind(kind)
    if p.V0 == 0.0:
        return 0.0, 0.0
    n = chain_order
    if kind == "reflection":
        return -math.pi, -math.pi * n
    return -0.5 * math.pi + math.pi * n, 0.0


@dataclass(frozen=True)
class PhaseTotal:
    """``delta(inf) - delta(0+)`` split into the grid part and analytic end corrections."""

    grid_total: float
    head: float
    tail: float
    max_jump: float

    @property
    def total(self) -> float:
        return self.grid_total + self.head + self.tail


def phase_total_variation(
    kind: str, chain_order: int, p: PotentialParams, k_min=1e-4, k_max=100.0, points=4000
) -> PhaseTotal:
    """Total phase change over ``(0, inf)`` from an unwrapped grid on ``[k_min, k_max]``.

    The slowly decaying remainders beyond the grid ends (the reflection tail
    falls off like ``log k / k``) are added from the continuous phase and its
    analytic limits.
    """
    k = np.geomspace(k_min, k_max, points)
    if p.V0 > 0:
        k = k[np.abs(k - p.threshold) >= 10 * GRID_THRESHOLD_EXCLUSION]
    curve = phase_curve(kind, chain_order, k, p)
    lo, hi = phase_limits(kind, chain_order, p)
    head = continuous_phase(kind, chain_order, k[0], p) - lo
    tail = hi - continuous_phase(kind, chain_order, k[-1], p)
    return PhaseTotal(curve.total_variation, head, tail, curve.max_jump())


def wigner_delay_at(kind: str, chain_order: int, k, p: PotentialParams):
    """Analytic Wigner delay ``Im(d log amp/dk) / k`` from digamma values."""
    _check_kind(kind)
    k_arr = np.asarray(k, dtype=float)
    d = dlog_reflection_dk(k_arr, p) if kind == "reflection" else dlog_transmission_dk(k_arr, p)
    if chain_order:
        dr, dt = partner_dlog_factors(k_arr, chain_order, p)
        d = d + (dr if kind == "reflection" else dt)
    tau = np.imag(d) / k_arr
    return float(tau) if tau.ndim == 0 else tau


def wigner_delay(phase: PhaseCurve, route: str = "analytic") -> DelayCurve:
    """Wigner delay along a phase curve.

    ``route`` is ``"analytic"`` (digamma) or ``"finite_difference"``
    (second-order differences of the unwrapped phase). Points within 0.05 of
    the threshold are flagged and set to NaN.
    """
    k = phase.k_grid
    p = phase.params
    if route == "analytic":
        tau = np.asarray(wigner_delay_at(phase.kind, phase.chain_order, k, p), dtype=float)
    elif route == "finite_difference":
        tau = np.gradient(phase.delta, k, edge_order=2) / k
    else:
        raise ValueError(f"unknown route {route!r}")
    flag = (np.abs(k - p.threshold) <= DELAY_THRESHOLD_WINDOW) if p.V0 > 0 else np.zeros(k.shape, bool)
    if phase.kind == "transmission":
        # no propagating transmitted wave below threshold
        flag = flag | (k < p.threshold)
    tau = np.where(flag, np.nan, tau)
    return DelayCurve(k, tau, phase.kind, phase.chain_order, flag, route)


# ---------------------------------------------------------------- classical


def classical_turning_point(E: float, p: PotentialParams) -> float:
    """``x_turn = 2 alpha artanh(2E/V0 - 1)`` (written as ``alpha logit(E/V0)``)."""
    if not 0.0 < E < p.V0:
        raise DomainError(f"turning point needs 0 < E < V0, got E = {E}")
    return float(p.alpha * logit(E / p.V0))


def _log_v(x, p):
    return math.log(p.V0) - np.logaddexp(0.0, -np.asarray(x, dtype=float) / p.alpha)


def _log_v0_minus_v(x, p):
    return math.log(p.V0) - np.logaddexp(0.0, np.asarray(x, dtype=float) / p.alpha)


def classical_primitive(x, E: float, p: PotentialParams):
    """Antiderivative of ``1 / (2 sqrt(E - V(x)))`` for general ``V0`` and ``alpha``.

    With ``u = sqrt(E - V)``, ``k = sqrt(E)``::

        E < V0:  P = -alpha [ artanh(u/k)/k + arctan(u/q)/q ],      q = sqrt(V0 - E)
        E > V0:  P = -alpha [ artanh(u/k)/k - artanh(k'/u)/k' ],    k' = sqrt(E - V0)

    The artanh terms are evaluated through ``k - u = V/(k+u)`` and
    ``u - k' = (V0 - V)/(u + k')`` so the far tails keep full precision.
    """
    x = np.asarray(x, dtype=float)
    if E <= 0:
        raise DomainError("classical primitive needs E > 0")
    k = math.sqrt(E)
    if p.V0 == 0.0:
        out = x / (2.0 * k)
        return float(out) if out.ndim == 0 else out
    V = potential(x, p)
    if np.any(V > E):
        raise DomainError("primitive evaluated in the classically forbidden region")
    u = np.sqrt(np.maximum(E - V, 0.0))
    with np.errstate(divide="ignore"):
        at_k = np.log(k + u) - 0.5 * _log_v(x, p)  # artanh(u/k)
    if E < p.V0:
        q = math.sqrt(p.V0 - E)
        out = -p.alpha * (at_k / k + np.arctan(u / q) / q)
    elif E > p.V0:
        kp = math.sqrt(E - p.V0)
        with np.errstate(divide="ignore"):
            at_kp = np.log(u + kp) - 0.5 * _log_v0_minus_v(x, p)  # artanh(k'/u)
        out = -p.alpha * (at_k / k - at_kp / kp)
    else:
        raise DomainError("classical primitive undefined at E = V0")
    return float(out) if out.ndim == 0 else out


def alternative_primitive(x, E: float):
    """Alternative closed form for ``V0 = 1/2``, ``alpha = 1`` (reference only).

    Evaluated in complex arithmetic. It does not differentiate back to the
    integrand in either energy regime, so no result in this library uses it.
    """
    k = math.sqrt(E)
    s = np.sqrt(-1.0 + 4.0 * k * k - np.tanh(np.asarray(x, dtype=float) / 2.0) + 0j)
    return -np.arctanh(s / (2.0 * k)) / k + np.arctanh(s / np.sqrt(2.0 - 4.0 * k * k + 0j)) / np.sqrt(
        0.5 - k * k + 0j
    )


def _free_integrand(E, p):
    return lambda x: 1.0 / (2.0 * math.sqrt(E - float(potential(x, p))))


def _turning_integrand(E, p, b):
    # sqrt(b - x) / (2 sqrt(E - V(x))); quad supplies the (b - x)^(-1/2) weight.
    # E - V(x) = V0 [expit(b/a) - expit(x/a)] is rewritten without cancellation near b.
    a = p.alpha
    cb = math.cosh(b / (2 * a))
    slope = p.V0 / (4 * a * cb * cb)  # V'(b)

    def g(x):
        h = b - x
        if h <= 0.0:
            return 0.5 / math.sqrt(slope)
        diff = p.V0 * math.sinh(h / (2 * a)) / (2 * cb * math.cosh(x / (2 * a)))
        return math.sqrt(h) / (2.0 * math.sqrt(diff))

    return g


def classical_traversal_time(a: float, b: float, E: float, p: PotentialParams, epsabs=1e-13, epsrel=1e-13) -> float:
    """Time ``int_a^b dx / (2 sqrt(E - V))`` by adaptive quadrature.

    ``b`` may be the turning point, in which case the inverse square-root
    endpoint singularity is handled by an algebraic weight.

    Raises
    ------
    DomainError
        If ``E <= V(x)`` somewhere in ``(a, b)``.
    """
    a, b = float(a), float(b)
    if b < a:
        return classical_traversal_time(b, a, E, p, epsabs, epsrel)
    if E <= 0:
        raise DomainError("classical motion needs E > 0")
    if p.V0 == 0.0:
        return (b - a) / (2.0 * math.sqrt(E))
    vb = float(potential(b, p))
    turning = E < p.V0 and abs(b - classical_turning_point(E, p)) <= 1e-12 * max(1.0, abs(b))
    if not turning and vb >= E:
        raise DomainError(f"E = {E} does not exceed V on ({a}, {b})")
    f = _free_integrand(E, p)
    if not turning:
        val, _ = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=500)
        return float(val)
    # weighted rule only on a short segment next to the turning point
    b = classical_turning_point(E, p)
    c = max(a, b - p.alpha)
    val, _ = quad(_turning_integrand(E, p, b), c, b, weight="alg", wvar=(0.0, -0.5),
                  epsabs=epsabs, epsrel=epsrel, limit=500)
    if c > a:
        val += quad(f, a, c, epsabs=epsabs, epsrel=epsrel, limit=500)[0]
    return float(val)


@dataclass(frozen=True)
class ClassicalDelayResult:
    """Classical delay at one energy; ``kind`` is reflection (E < V0) or transmission."""

    E: float
    d: float
    kind: str
    tau: float
    tau_primitive: float
    convergence_flag: bool


def _classical_tau(E, d, p, kind, route):
    k = math.sqrt(E)
    if kind == "reflection":
        xt = classical_turning_point(E, p)
        if route == "quad":
            T = classical_traversal_time(-d, xt, E, p)
        else:
            # the primitive vanishes exactly at the turning point (u = 0)
            T = -float(classical_primitive(-d, E, p))
        return 2.0 * T - d / k
    kp = math.sqrt(E - p.V0)
    if route == "quad":
        T = classical_traversal_time(-d, d, E, p)
    else:
        T = float(classical_primitive(d, E, p) - classical_primitive(-d, E, p))
    return T - d / (2.0 * kp) - d / (2.0 * k)


def classical_delays(E: float, p: PotentialParams, d: float | None = None) -> ClassicalDelayResult:
    """Classical reflection (``E < V0``) or transmission (``E > V0``) delay.

    ``tau`` comes from quadrature, ``tau_primitive`` from the closed-form
    antiderivative; ``convergence_flag`` reports whether doubling ``d``
    changes ``tau`` by less than 1e-6.

    Raises
    ------
    DomainError
        For ``E <= 0``, ``E = V0``, or ``d`` too small for ``V(-d) < 1e-12 V0``.
    """
    E = float(E)
    if E <= 0 or E == p.V0:
        raise DomainError(f"classical delay undefined at E = {E}")
    if p.V0 == 0.0:
        raise DomainError("classical delay needs V0 > 0")
    d = DEFAULT_D_FACTOR * p.alpha if d is None else float(d)
    if d < MIN_D_FACTOR * p.alpha:
        raise DomainError(f"d must be at least {MIN_D_FACTOR:.1f} alpha so that V(-d) < 1e-12 V0")
    kind = "reflection" if E < p.V0 else "transmission"
    tau = _classical_tau(E, d, p, kind, "quad")
    tau_prim = _classical_tau(E, d, p, kind, "primitive")
    tau_2d = _classical_tau(E, 2.0 * d, p, kind, "quad")
    return ClassicalDelayResult(E, d, kind, tau, tau_prim, abs(tau_2d - tau) < D_DOUBLING_TOL)
