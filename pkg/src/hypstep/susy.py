"""SUSY (Darboux-Crum) partners built from anti-bound seeds.

A chain of order ``n`` uses the seeds ``phi_1, ..., phi_n`` (anti-bound
wavefunctions at energies ``eps_s = k(s)**2 < 0``). The partner potential is
``V - 2 (log Wr)''`` with ``Wr`` the Wronskian of the seeds, and its bound
states are ``Wr(seeds without s) / Wr(seeds)`` at ``eps_s``. All seeds are
exponential polynomials, so every derivative here is exact.

Partner amplitudes are products of first-order factors, one per seed, built
from the asymptotic values ``W_s^-`` (x -> -inf) and ``W_s^+`` (x -> +inf) of
the seed superpotential ``W_s = -phi_s'/phi_s``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from ._exppoly import ExpPoly, wronskian
from .errors import DomainError, InadmissibleIndexError, NodeError, WronskianZeroError
from .model import PotentialParams, antibound_momenta, antibound_seed, is_admissible_index, potential
from .scattering import reflection_amplitude, transmission_amplitude, transmitted_momentum

__all__ = [
    "SuperPotential",
    "BoundState",
    "SusyChain",
    "superpotential",
    "asymptotic_superpotentials",
    "susy_chain",
    "partner_potential",
    "partner_potential_closed_form",
    "partner_bound_states",
    "partner_amplitudes",
    "partner_dlog_factors",
    "reflection_phase_shift",
    "transmission_phase_shift",
    "susy_delay_shift",
]

# half-width (in units of alpha) of the grid used for the numerical node scan
NODE_SCAN_HALF_WIDTH = 50.0
NODE_SCAN_POINTS = 20001


def asymptotic_superpotentials(n: int, p: PotentialParams) -> tuple[float, float]:
    """``(W_minus, W_plus) = ((n - lam^2/n) / 2 alpha, -(n + lam^2/n) / 2 alpha)``."""
    lam2 = p.lam2
    return 0.5 * (n - lam2 / n) / p.alpha, -0.5 * (n + lam2 / n) / p.alpha


def _scan_for_sign_change(f: ExpPoly, alpha, what):
    # exact check on the polynomial part plus a numerical scan on a wide grid
    roots = f.positive_roots()
    if roots.size:
        x0 = alpha * np.log(roots[0])
        raise what(f"zero at x = {x0:.6g}")
    x = np.linspace(-NODE_SCAN_HALF_WIDTH * alpha, NODE_SCAN_HALF_WIDTH * alpha, NODE_SCAN_POINTS)
    _, sign = f.log_abs(x)
    if np.any(sign != sign[0]) or np.any(sign == 0):
        raise what("sign change on the real line")


@dataclass(frozen=True)
class SuperPotential:
    n: int
    W_plus: float
    W_minus: float
    seed: ExpPoly = field(repr=False)

    def __call__(self, x):
        d1, _ = self.seed.log_derivatives(np.asarray(x, dtype=float))
        return -d1


def superpotential(n: int, p: PotentialParams) -> SuperPotential:
    """Superpotential ``W = -phi_n'/phi_n`` of anti-bound seed ``n``.

    Raises
    ------
    InadmissibleIndexError
        If ``n <= lambda``.
    NodeError
        If the seed vanishes somewhere on the real line.
    """
    seed = antibound_seed(n, p)
    try:
        _scan_for_sign_change(seed, p.alpha, NodeError)
    except NodeError as exc:
        raise NodeError(f"seed {n} is not nodeless: {exc}") from exc
    w_minus, w_plus = asymptotic_superpotentials(n, p)
    return SuperPotential(n=n, W_plus=w_plus, W_minus=w_minus, seed=seed)


class _WronskianRatio:
    """``num / den`` for exponential polynomials, evaluated in log space."""

    def __init__(self, num: ExpPoly, den: ExpPoly):
        self.num = num
        self.den = den

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ln, sn = self.num.log_abs(x)
        ld, sd = self.den.log_abs(x)
        return sn * sd * np.exp(ln - ld)

    def decay_rates(self) -> tuple[float, float]:
        """Exponents ``a, b`` with ``|f| ~ e^{a x}`` at -inf and ``e^{b x}`` at +inf."""
        al = self.num.alpha
        left = (self.num.rate - self.den.rate) / al
        right = (self.num.rate + self.num.degree - self.den.rate - self.den.degree) / al
        return left, right


@dataclass(frozen=True)
class BoundState:
    index: int
    energy: float
    wavefunction: _WronskianRatio = field(repr=False)

    def __call__(self, x):
        return self.wavefunction(x)


@dataclass(frozen=True)
class SusyChain:
    """Darboux-Crum partner of order ``len(seeds)``.

    ``outside_analyzed_set`` marks single-seed transformations with an even
    seed index; delay results are validated for odd seeds only.
    """

    params: PotentialParams
    seeds: tuple[int, ...]
    wronskian: ExpPoly = field(repr=False)
    bound_states: tuple[BoundState, ...] = field(repr=False)
    superpotentials: tuple[SuperPotential | None, ...] = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.seeds)

    @property
    def outside_analyzed_set(self) -> bool:
        return len(self.seeds) == 1 and self.seeds[0] % 2 == 0

    def partner_potential(self, x):
        x = np.asarray(x, dtype=float)
        if not self.seeds:
            return potential(x, self.params)
        return potential(x, self.params) - 2.0 * self.wronskian.log_second_derivative(x)

    def closed_form(self, x):
        return partner_potential_closed_form(self.order, x, self.params)


def _seed_energy(s, p):
    k, _ = antibound_momenta(s, p)
    return float((k * k).real)


@functools.lru_cache(maxsize=64)
def susy_chain(order: int, p: PotentialParams, seeds: tuple[int, ...] | None = None) -> SusyChain:
    """Build the partner of the given order (seeds ``1..order`` unless given).

    Raises
    ------
    InadmissibleIndexError
        If a seed index is not above ``lambda``.
    WronskianZeroError
        If the seed Wronskian vanishes on the real line.
    """
    if order < 0:
        raise DomainError("chain order must be non-negative")
    seeds = tuple(range(1, order + 1)) if seeds is None else tuple(int(s) for s in seeds)
    if len(seeds) != order or len(set(seeds)) != order:
        raise DomainError(f"need {order} distinct seeds, got {seeds}")
    for s in seeds:
        if not is_admissible_index(s, p):
            raise InadmissibleIndexError(f"seed {s} is not above lambda = {p.lam:.12g}")
    if not seeds:
        return SusyChain(p, (), ExpPoly(0.0, [1.0], p.alpha), (), ())
    funcs = [antibound_seed(s, p) for s in seeds]
    wr = wronskian(funcs)
    try:
        _scan_for_sign_change(wr, p.alpha, WronskianZeroError)
    except WronskianZeroError as exc:
        raise WronskianZeroError(f"Wronskian of seeds {seeds}: {exc}") from exc
    states = []
    for i, s in enumerate(seeds):
        rest = funcs[:i] + funcs[i + 1 :]
        num = wronskian(rest) if rest else ExpPoly(0.0, [1.0], p.alpha)
        states.append(BoundState(index=s, energy=_seed_energy(s, p), wavefunction=_WronskianRatio(num, wr)))
    states.sort(key=lambda b: b.energy)
    sps = []
    for s in seeds:
        w_minus, w_plus = asymptotic_superpotentials(s, p)
        sps.append(SuperPotential(n=s, W_plus=w_plus, W_minus=w_minus, seed=antibound_seed(s, p)))
    return SusyChain(p, seeds, wr, tuple(states), tuple(sps))


def partner_potential_closed_form(order: int, x, p: PotentialParams):
    """``(V0/2)(1 + tanh(x/2a)) - n(n+1)/(4a^2) sech^2(x/2a)``."""
    x = np.asarray(x, dtype=float)
    a = p.alpha
    return potential(x, p) - order * (order + 1) / (4.0 * a * a) / np.cosh(x / (2.0 * a)) ** 2


def partner_potential(order: int, x, p: PotentialParams, route: str = "darboux"):
    """Partner potential of the given order.

    ``route`` is ``"darboux"`` (Wronskian construction, authoritative) or
    ``"closed_form"``.
    """
    if route == "darboux":
        return susy_chain(order, p).partner_potential(x)
    if route == "closed_form":
        return partner_potential_closed_form(order, x, p)
    raise ValueError(f"unknown route {route!r}")


def partner_bound_states(order: int, p: PotentialParams) -> list[BoundState]:
    """Bound states of the order-``order`` partner, sorted by energy."""
    return list(susy_chain(order, p).bound_states)


def _chain_constants(order, p, seeds):
    seeds = tuple(range(1, order + 1)) if seeds is None else tuple(seeds)
    return [asymptotic_superpotentials(s, p) for s in seeds]


def partner_amplitudes(k, order: int, p: PotentialParams, seeds=None):
    """``(r~, t~)`` of the partner, one factor per seed.

    ``r~ = r prod (W_s^- - ik)/(W_s^- + ik)`` and
    ``t~ = t prod (ik' + W_s^+)/(ik + W_s^-)``.
    """
    k_arr = np.asarray(k, dtype=complex)
    kp = np.asarray(transmitted_momentum(k_arr, p), dtype=complex)
    r = np.asarray(reflection_amplitude(k_arr, p), dtype=complex)
    t = np.asarray(transmission_amplitude(k_arr, p), dtype=complex)
    for w_minus, w_plus in _chain_constants(order, p, seeds):
        r = r * (w_minus - 1j * k_arr) / (w_minus + 1j * k_arr)
        t = t * (1j * kp + w_plus) / (1j * k_arr + w_minus)
    if np.ndim(k) == 0:
        return complex(r), complex(t)
    return r, t


def partner_dlog_factors(k, order: int, p: PotentialParams, seeds=None):
    """k-derivatives of ``log(r~/r)`` and ``log(t~/t)`` (summed over the chain)."""
    k = np.asarray(k, dtype=complex)
    kp = np.asarray(transmitted_momentum(k, p), dtype=complex)
    dr = np.zeros_like(k)
    dt = np.zeros_like(k)
    for w_minus, w_plus in _chain_constants(order, p, seeds):
        dr = dr - 1j / (w_minus - 1j * k) - 1j / (w_minus + 1j * k)
        dt = dt + 1j * (k / kp) / (1j * kp + w_plus) - 1j / (1j * k + w_minus)
    return dr, dt


def reflection_phase_shift(k, n: int, p: PotentialParams):
    """``Delta_r = -2 arctan(k / W_n^-)`` (one seed)."""
    w_minus, _ = asymptotic_superpotentials(n, p)
    return -2.0 * np.arctan(np.asarray(k, dtype=float) / w_minus)


def transmission_phase_shift(k, n: int, p: PotentialParams):
    """``Delta_t = pi/2 + arctan(-W_n^+/k') - arctan(k/W_n^-)`` above threshold."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= p.threshold):
        raise DomainError("transmission phase shift needs k > sqrt(V0)")
    w_minus, w_plus = asymptotic_superpotentials(n, p)
    kp = np.sqrt(k * k - p.V0)
    return 0.5 * np.pi + np.arctan(-w_plus / kp) - np.arctan(k / w_minus)


def susy_delay_shift(n: int, k, p: PotentialParams):
    """Delay shifts ``((Delta tau)_r, (Delta tau)_t)`` caused by seed ``n``.

    ``(Delta tau)_t`` is NaN where ``k <= sqrt(V0)``; a scalar ``k`` below
    threshold raises instead.
    """
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr <= 0.0):
        raise DomainError("delay shifts need k > 0")
    w_minus, w_plus = asymptotic_superpotentials(n, p)
    d_r = -2.0 * w_minus / (k_arr**3 + k_arr * w_minus**2)
    above = k_arr > p.threshold
    if k_arr.ndim == 0 and not above:
        raise DomainError("(Delta tau)_t needs k > sqrt(V0)")
    with np.errstate(invalid="ignore"):
        kp2 = k_arr * k_arr - p.V0
        d_t = -w_minus / (k_arr**3 + k_arr * w_minus**2) + w_plus / (np.sqrt(kp2) * (kp2 + w_plus**2))
    d_t = np.where(above, d_t, np.nan)
    if k_arr.ndim == 0:
        return float(d_r), float(d_t)
    return d_r, d_t
