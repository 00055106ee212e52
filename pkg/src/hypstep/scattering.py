"""Transfer and scattering matrices, amplitudes and the anti-bound pole ladder.

The transfer matrix maps the left amplitudes ``(A, B)`` of
``exp(+-ikx)`` onto the right amplitudes ``(C, D)`` of ``exp(+-ik'x)``.
With ``a = i alpha k`` and ``b = i alpha k'``::

    T11 =  (k/k') G(2a)  G(1+2b) / [G(a+b)    G(1+a+b)]
    T12 = -(k/k') G(-2a) G(1+2b) / [G(-(a-b)) G(1-(a-b))]
    T21 = -(k/k') G(2a)  G(1-2b) / [G(a-b)    G(1+a-b)]
    T22 =  (k/k') G(-2a) G(1-2b) / [G(-(a+b)) G(1-(a+b))]

and ``det T = k/k'``. For a wave incident from the left, ``r = -T21/T22``
and ``t = det T / T22``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GammaPoleError, ThresholdError
from .model import PotentialParams, antibound_momenta, is_admissible_index, transmitted_momentum
from .specfun import digamma, gamma_ratio, log_gamma

__all__ = [
    "MomentumPair",
    "TransferMatrix",
    "ScatterMatrix",
    "AmplitudeRecord",
    "AntiboundPole",
    "momentum_pair",
    "transfer_matrix",
    "scatter_matrix",
    "amplitudes",
    "reflection_amplitude",
    "transmission_amplitude",
    "inverse_transmission_amplitude",
    "log_reflection",
    "log_transmission",
    "log_inverse_transmission",
    "dlog_reflection_dk",
    "dlog_transmission_dk",
    "antibound_poles",
    "pole_admissibility_check",
    "winding_number",
    "circle_contour",
    "rectangle_contour",
    "pole_winding_probe",
    "pole_free_rectangles",
    "rectangle_scan",
]

THRESHOLD_EXCLUSION = 1e-9
T22_POLE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class MomentumPair:
    k: complex
    kprime: complex


@dataclass(frozen=True)
class TransferMatrix:
    T11: complex
    T12: complex
    T21: complex
    T22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.T11, self.T12], [self.T21, self.T22]])

    @property
    def det(self) -> complex:
        return self.T11 * self.T22 - self.T12 * self.T21


@dataclass(frozen=True)
class ScatterMatrix:
    """Maps incoming ``(A, D)`` onto outgoing ``(B, C)``."""

    S11: complex
    S12: complex
    S21: complex
    S22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.S11, self.S12], [self.S21, self.S22]])

    def unitarity_defect(self, k, kprime) -> float:
        """Max entrywise ``|S^H K S - K|`` with ``K = diag(k, k')``."""
        K = np.diag([k, kprime])
        S = self.as_array()
        return float(np.max(np.abs(S.conj().T @ K @ S - K)))


@dataclass(frozen=True)
class AmplitudeRecord:
    """Amplitudes at one real momentum.

    Below threshold ``t`` is the amplitude of the decaying wave and
    ``evanescent`` is set; it carries no flux.
    """

    k: float
    kprime: complex
    r: complex
    t: complex
    R: float
    T: float
    delta_r: float
    delta_t: float
    evanescent: bool = False

    def flux_sum(self) -> float:
        """``(k'/k) T + R``; equal to 1 above threshold (just ``R`` below it)."""
        if self.evanescent:
            return self.R
        return float((self.kprime.real / self.k) * self.T + self.R)


@dataclass(frozen=True)
class AntiboundPole:
    n: int
    k_n: complex
    kprime_n: complex
    E_n: float


def momentum_pair(k, p: PotentialParams) -> MomentumPair:
    return MomentumPair(complex(k), transmitted_momentum(complex(k), p))


_ENTRIES = {
    # name: (sign, numerators, denominators) in terms of (a, b)
    "T11": (1.0, lambda a, b: [2 * a, 1 + 2 * b], lambda a, b: [a + b, 1 + a + b]),
    "T12": (-1.0, lambda a, b: [-2 * a, 1 + 2 * b], lambda a, b: [-(a - b), 1 - (a - b)]),
    "T21": (-1.0, lambda a, b: [2 * a, 1 - 2 * b], lambda a, b: [a - b, 1 + a - b]),
    "T22": (1.0, lambda a, b: [-2 * a, 1 - 2 * b], lambda a, b: [-(a + b), 1 - (a + b)]),
}


def transfer_matrix(k, p: PotentialParams) -> TransferMatrix:
    """Transfer matrix at complex momentum ``k``.

    Raises
    ------
    GammaPoleError
        With ``entry`` naming the matrix element whose numerator hits a pole.
    """
    mp = momentum_pair(k, p)
    a = 1j * p.alpha * mp.k
    b = 1j * p.alpha * mp.kprime
    pref = mp.k / mp.kprime
    vals = {}
    for name, (sign, num, den) in _ENTRIES.items():
        try:
            vals[name] = sign * pref * gamma_ratio(num(a, b), den(a, b))
        except GammaPoleError as exc:
            raise GammaPoleError(f"{name} at k = {mp.k}: {exc}", entry=name) from exc
    return TransferMatrix(**vals)


def scatter_matrix(k, p: PotentialParams) -> ScatterMatrix:
    """S-matrix from the transfer matrix.

    Raises
    ------
    GammaPoleError
        If ``|T22| < 1e-12`` (``k`` sits on an anti-bound pole).
    """
    T = transfer_matrix(k, p)
    if abs(T.T22) < T22_POLE_THRESHOLD:
        raise GammaPoleError(f"|T22| = {abs(T.T22):.3g} at k = {k}: S-matrix pole", entry="T22")
    return ScatterMatrix(-T.T21 / T.T22, 1.0 / T.T22, T.det / T.T22, T.T12 / T.T22)


def _gamma_args(k, p):
    k = np.asarray(k, dtype=complex)
    kp = np.asarray(transmitted_momentum(k, p), dtype=complex)
    al = p.alpha
    two_a = 2j * al * k
    z = -1j * al * (k + kp)
    # k - k' = V0 / (k + k') avoids cancellation at large |k|
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(k + kp == 0, 0.0, 1j * al * p.V0 / (k + kp))
    return k, kp, two_a, z, w


def _scalar(x, like):
    return complex(x) if np.ndim(like) == 0 else x


def reflection_amplitude(k, p: PotentialParams):
    """``r(k) = G(2iak) G(z) G(1+z) / [G(-2iak) G(w) G(1+w)]``."""
    k, kp, two_a, z, w = _gamma_args(k, p)
    return _scalar(gamma_ratio([two_a, z, 1 + z], [-two_a, w, 1 + w]), k)


def transmission_amplitude(k, p: PotentialParams):
    """``t(k) = G(z) G(1+z) / [G(-2iak) G(1-2iak')]`` with ``z = -i alpha (k + k')``."""
    k, kp, two_a, z, w = _gamma_args(k, p)
    return _scalar(gamma_ratio([z, 1 + z], [-two_a, 1 - 2j * p.alpha * kp]), k)


def inverse_transmission_amplitude(k, p: PotentialParams):
    k, kp, two_a, z, w = _gamma_args(k, p)
    return _scalar(gamma_ratio([-two_a, 1 - 2j * p.alpha * kp], [z, 1 + z]), k)


def log_reflection(k, p: PotentialParams):
    """A logarithm of ``r`` (imaginary part not unwrapped)."""
    k, kp, two_a, z, w = _gamma_args(k, p)
    out = (
        log_gamma(two_a) + log_gamma(z) + log_gamma(1 + z)
        - log_gamma(-two_a) - log_gamma(w) - log_gamma(1 + w)
    )
    return _scalar(out, k)


def log_transmission(k, p: PotentialParams):
    k, kp, two_a, z, w = _gamma_args(k, p)
    out = log_gamma(z) + log_gamma(1 + z) - log_gamma(-two_a) - log_gamma(1 - 2j * p.alpha * kp)
    return _scalar(out, k)


def log_inverse_transmission(k, p: PotentialParams):
    return -np.asarray(log_transmission(k, p)) if np.ndim(k) else -log_transmission(k, p)


def dlog_reflection_dk(k, p: PotentialParams):
    """``d log r / dk`` from digamma values, using ``dk'/dk = k/k'``."""
    k, kp, two_a, z, w = _gamma_args(k, p)
    al = p.alpha
    ratio = k / kp
    out = (
        2j * al * (digamma(two_a) + digamma(-two_a))
        - 1j * al * (1 + ratio) * (digamma(z) + digamma(1 + z))
        - 1j * al * (1 - ratio) * (digamma(w) + digamma(1 + w))
    )
    return _scalar(out, k)


def dlog_transmission_dk(k, p: PotentialParams):
    k, kp, two_a, z, w = _gamma_args(k, p)
    al = p.alpha
    ratio = k / kp
    out = (
        -1j * al * (1 + ratio) * (digamma(z) + digamma(1 + z))
        + 2j * al * digamma(-two_a)
        + 2j * al * ratio * digamma(1 - 2j * al * kp)
    )
    return _scalar(out, k)


def amplitudes(k: float, p: PotentialParams) -> AmplitudeRecord:
    """Reflection and transmission data at real ``k > 0``.

    Raises
    ------
    ThresholdError
        If ``|k - sqrt(V0)| < 1e-9``.
    DomainError
        If ``k <= 0``.
    """
    k = float(k)
    if not k > 0.0:
        raise DomainError(f"amplitudes need k > 0, got {k}")
    if p.V0 > 0.0 and abs(k - p.threshold) < THRESHOLD_EXCLUSION:
        raise ThresholdError(f"k = {k} is within {THRESHOLD_EXCLUSION} of the threshold")
    r = reflection_amplitude(k, p)
    t = transmission_amplitude(k, p)
    return AmplitudeRecord(
        k=k,
        kprime=transmitted_momentum(k, p),
        r=r,
        t=t,
        R=abs(r) ** 2,
        T=abs(t) ** 2,
        delta_r=float(np.angle(r)),
        delta_t=float(np.angle(t)),
        evanescent=k < p.threshold,
    )


def antibound_poles(p: PotentialParams, n_max: int) -> list[AntiboundPole]:
    """Anti-bound poles ``k(n)`` for admissible ``n <= n_max`` (``n > lambda``)."""
    poles = []
    for n in range(1, int(n_max) + 1):
        if not is_admissible_index(n, p):
            continue
        k, kp = antibound_momenta(n, p)
        poles.append(AntiboundPole(n=n, k_n=k, kprime_n=kp, E_n=float((k * k).real)))
    return poles


def pole_admissibility_check(n: int, p: PotentialParams) -> tuple[bool, complex]:
    """Admissibility of index ``n`` and its certificate ``-i alpha (k(n) + k'(k(n)))``.

    ``k'`` is evaluated on the physical branch rather than from the pole
    formula, so the certificate equals ``-n`` for a genuine pole and is a
    positive real number when ``k(n)`` falls on the upper half plane.
    """
    k, _ = antibound_momenta(n, p)
    kp = transmitted_momentum(k, p)
    cert = complex(-1j * p.alpha * (k + kp))
    return is_admissible_index(n, p), cert


# ---------------------------------------------------------------- winding


def circle_contour(center, radius):
    center = complex(center)

    def path(s):
        return center + radius * np.exp(2j * np.pi * np.asarray(s))

    return path


def rectangle_contour(re_min, re_max, im_min, im_max):
    """Counter-clockwise rectangle, parametrised on ``s`` in [0, 1]."""
    corners = np.array(
        [re_min + 1j * im_min, re_max + 1j * im_min, re_max + 1j * im_max, re_min + 1j * im_max]
    )

    def path(s):
        s = np.asarray(s, dtype=float) * 4.0
        idx = np.minimum(np.floor(s).astype(int), 3)
        frac = s - idx
        start = corners[idx]
        end = corners[(idx + 1) % 4]
        return start + frac * (end - start)

    return path


def winding_number(log_f, path, n_initial=256, max_step=0.25, max_points=1 << 20):
    """Winding number of ``f`` around 0 along a closed ``path``.

    ``log_f`` may return any branch of ``log f``; successive phase increments
    are reduced modulo ``2 pi`` and segments are bisected until every
    increment is below ``max_step`` radians, so branch jumps of the
    logarithm never leak into the count.

    Returns
    -------
    float
        The accumulated phase divided by ``2 pi`` (close to an integer when
        the contour resolution is adequate).
    """
    s = np.linspace(0.0, 1.0, n_initial + 1)
    phase = np.imag(log_f(path(s)))
    while True:
        inc = np.angle(np.exp(1j * np.diff(phase)))
        bad = np.abs(inc) > max_step
        if not np.any(bad):
            return float(np.sum(inc) / (2.0 * np.pi))
        if s.size + np.count_nonzero(bad) > max_points:
            raise GammaPoleError("winding contour could not be resolved (zero or pole on the path?)")
        mids = 0.5 * (s[:-1][bad] + s[1:][bad])
        mid_phase = np.imag(log_f(path(mids)))
        s = np.concatenate([s, mids])
        phase = np.concatenate([phase, mid_phase])
        order = np.argsort(s)
        s, phase = s[order], phase[order]


def pole_winding_probe(n: int, p: PotentialParams, radius=1e-3) -> float:
    """Winding of ``1/t`` on a circle about ``k(n)`` (order of the zero of ``1/t``)."""
    k, _ = antibound_momenta(n, p)
    return winding_number(lambda kk: log_inverse_transmission(kk, p), circle_contour(k, radius))


def pole_free_rectangles(p: PotentialParams, half_width=5.0, margin=0.05):
    """Rectangles covering the box minus strips around the cut and the negative imaginary axis."""
    L, m, q = half_width, margin, p.threshold
    return [
        (-L, L, m, L),
        (-L, -m, -L, -m),
        (m, L, -L, -m),
        (q + m, L, -m, m),
        (-L, -q - m, -m, m),
    ]


def rectangle_scan(p: PotentialParams, rects=None, **kwargs) -> list[tuple[tuple, float]]:
    """Winding of ``1/t`` around each rectangle; zero means no poles or zeros inside."""
    rects = pole_free_rectangles(p) if rects is None else rects
    log_f = lambda kk: log_inverse_transmission(kk, p)  # noqa: E731
    return [(r, winding_number(log_f, rectangle_contour(*r), **kwargs)) for r in rects]
