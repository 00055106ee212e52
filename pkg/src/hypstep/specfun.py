"""Complex special functions for the closed-form scattering theory.

Everything here is vectorised over numpy arrays and returns a plain Python
``complex`` when called with scalars.

log_gamma
    Stirling series (8 Bernoulli terms) after an upward shift
    ``z -> z + N`` chosen so that ``Re(z + N) >= 0`` and ``|z + N| >= 12``.
    The shift is undone by subtracting ``sum(log(z + j))`` with principal
    logarithms, which yields the analytic continuation of ``log Gamma`` with
    its branch cut on the negative real axis (same convention as
    ``scipy.special.loggamma`` and ``mpmath.loggamma``). The truncation
    error at ``|w| = 12`` is below 1e-19; validated against mpmath to 1e-12
    relative on ``|z| <= 100``.
digamma
    Same shift, asymptotic expansion of ``psi`` with 8 Bernoulli terms.
hyp2f1
    Gauss series for ``y <= 1/2`` (direct or Euler-transformed, whichever
    has the smaller cancellation), the ``y -> 1 - y`` connection formula for
    ``y > 1/2``. Between 1/2 and 0.9 the plain series is also summed and
    kept when the connection coefficients cancel worse (they blow up as
    ``c - a - b`` approaches an integer).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DomainError,
    GammaPoleError,
    HypergeometricParameterError,
    NonConvergenceError,
)

__all__ = ["log_gamma", "digamma", "gamma_ratio", "hyp2f1"]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_MIN_MODULUS = 12.0

# B_{2j} / (2j (2j - 1)), j = 1..8
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# B_{2j} / (2j), j = 1..8
_PSI_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)

SERIES_TOL = 1e-16
SERIES_MAX_TERMS = 10_000
NEAR_INTEGER = 1e-8
DIRECT_SERIES_MAX_Y = 0.9


def _to_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


def _is_pole(z):
    return (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.round(z.real))


def _shift_counts(z):
    # smallest N >= 0 with Re(z+N) >= 0 and |z+N| >= _MIN_MODULUS
    need_re = np.maximum(0.0, np.ceil(-z.real))
    rem = _MIN_MODULUS**2 - z.imag**2
    need_mod = np.where(rem > 0.0, np.ceil(np.sqrt(np.maximum(rem, 0.0)) - z.real), 0.0)
    return np.maximum(need_re, np.maximum(need_mod, 0.0)).astype(int)


def _horner(coeffs, x):
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def log_gamma(z):
    """Principal-branch ``log Gamma(z)`` for complex ``z``.

    Raises
    ------
    GammaPoleError
        If any element of ``z`` is a non-positive integer.
    """
    z, scalar = _to_array(z)
    if np.any(_is_pole(z)):
        raise GammaPoleError("log_gamma evaluated at a pole (non-positive integer)")
    n = _shift_counts(z)
    acc = np.zeros_like(z)
    for j in range(int(n.max(initial=0))):
        mask = n > j
        acc[mask] += np.log(z[mask] + j)
    w = z + n
    inv = 1.0 / w
    series = inv * _horner(_STIRLING, inv * inv)
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - acc
    return _out(out, scalar)


def digamma(z):
    """Digamma ``psi(z) = d log Gamma / dz`` for complex ``z``."""
    z, scalar = _to_array(z)
    if np.any(_is_pole(z)):
        raise GammaPoleError("digamma evaluated at a pole (non-positive integer)")
    n = _shift_counts(z)
    acc = np.zeros_like(z)
    for j in range(int(n.max(initial=0))):
        mask = n > j
        acc[mask] += 1.0 / (z[mask] + j)
    w = z + n
    inv2 = 1.0 / (w * w)
    out = np.log(w) - 0.5 / w - inv2 * _horner(_PSI_ASYMPTOTIC, inv2) - acc
    return _out(out, scalar)


def _log_residue(z):
    # Res_{z=-m} Gamma = (-1)^m / m!
    m = np.rint(-z.real)
    lg = np.array([math.lgamma(v + 1.0) for v in m.ravel()]).reshape(m.shape)
    return -lg + 1j * np.pi * m


def gamma_ratio(numerators, denominators):
    """``prod Gamma(numerators) / prod Gamma(denominators)`` evaluated in log space.

    Arguments broadcast against each other. A Gamma pole in the denominator
    makes the ratio vanish. When numerator and denominator carry the same
    number of poles the ratio of residues is returned, i.e. the limit along
    which every pole argument is displaced by the same amount.

    Raises
    ------
    GammaPoleError
        If a numerator has more poles than the denominator can cancel.
    """
    nums = [np.asarray(a, dtype=complex) for a in numerators]
    dens = [np.asarray(a, dtype=complex) for a in denominators]
    args = nums + dens
    scalar = all(a.ndim == 0 for a in args)
    shape = np.broadcast_shapes(*(a.shape for a in args)) if args else ()
    total = np.zeros(shape, dtype=complex)
    n_poles = np.zeros(shape, dtype=int)
    d_poles = np.zeros(shape, dtype=int)
    for group, sign, count in ((nums, 1.0, n_poles), (dens, -1.0, d_poles)):
        for a in group:
            a = np.broadcast_to(a, shape)
            pole = _is_pole(a)
            safe = np.where(pole, 1.0, a)
            contrib = np.where(pole, _log_residue(np.where(pole, a, 0.0)), log_gamma(safe))
            total += sign * contrib
            count += pole
    if np.any(n_poles > d_poles):
        raise GammaPoleError("numerator Gamma pole not cancelled by the denominator")
    with np.errstate(over="ignore"):
        out = np.where(n_poles == d_poles, np.exp(total), 0.0)
    return _out(out, scalar)


def _near_nonpositive_integer(c):
    m = round(-c.real)
    return m >= 0 and abs(c + m) < NEAR_INTEGER


def _series(a, b, c, y):
    """Gauss series; returns (sum, largest |term|) per element of ``y``."""
    total = np.ones_like(y, dtype=complex)
    term = np.ones_like(y, dtype=complex)
    biggest = np.ones_like(y, dtype=float)
    small_prev = np.zeros(y.shape, dtype=bool)
    for n in range(SERIES_MAX_TERMS):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1))) * y
        total = total + term
        mag = np.abs(term)
        biggest = np.maximum(biggest, mag)
        small = mag <= SERIES_TOL * np.abs(total)
        if np.all(small & small_prev):
            return total, biggest
        small_prev = small
    raise NonConvergenceError(
        f"2F1 series did not converge within {SERIES_MAX_TERMS} terms"
    )


def _series_stable(a, b, c, y, log_one_minus_y):
    """Direct or Euler-transformed series, picking the smaller cancellation.

    Returns the value and the cancellation estimate ``max|term| / |sum|``.
    """
    direct, big_d = _series(a, b, c, y)
    s = c - a - b
    euler, big_e = _series(c - a, c - b, c, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        loss_d = big_d / np.abs(direct)
        loss_e = big_e / np.abs(euler)
    euler = np.exp(s * log_one_minus_y) * euler
    use_euler = loss_e < loss_d
    return np.where(use_euler, euler, direct), np.where(use_euler, loss_e, loss_d)


def _connection(a, b, c, y, w):
    """``y -> 1 - y`` connection formula with its cancellation estimate."""
    s = c - a - b
    first = gamma_ratio([c, s], [c - a, c - b])
    second = gamma_ratio([c, -s], [a, b])
    value = np.zeros(y.shape, dtype=complex)
    scale = np.zeros(y.shape, dtype=float)
    if first != 0:
        f1, l1 = _series_stable(a, b, 1.0 - s, w, np.log(y))
        value += first * f1
        scale += np.abs(first * f1) * l1
    if second != 0:
        f2, l2 = _series_stable(c - a, c - b, 1.0 + s, w, np.log(y))
        f2 = second * np.exp(s * np.log(w)) * f2
        value += f2
        scale += np.abs(f2) * l2
    with np.errstate(divide="ignore", invalid="ignore"):
        return value, scale / np.abs(value)


def hyp2f1_pair(a, b, c, y, one_minus_y):
    """``2F1(a, b; c; y)`` given both ``y`` and an accurate ``1 - y``.

    Supplying ``1 - y`` separately keeps full relative precision when ``y``
    is close to 1 (the wavefunction evaluates both from ``x`` directly).
    """
    a, b, c = complex(a), complex(b), complex(c)
    y = np.asarray(y, dtype=float)
    w = np.asarray(one_minus_y, dtype=float)
    scalar = y.ndim == 0
    y, w = np.atleast_1d(y), np.atleast_1d(w)
    if np.any((y < 0.0) | (y > 1.0) | (w <= 0.0)):
        raise DomainError("hyp2f1 requires 0 <= y < 1")
    if _near_nonpositive_integer(c):
        raise HypergeometricParameterError(f"c = {c} is (near) a non-positive integer")

    out = np.empty(y.shape, dtype=complex)
    low = y <= 0.5
    if np.any(low):
        out[low] = _series_stable(a, b, c, y[low], np.log1p(-y[low]))[0]
    high = ~low
    if np.any(high):
        s = c - a - b
        yh, wh = y[high], w[high]
        if abs(s - round(s.real)) < NEAR_INTEGER:
            # connection formula degenerates; the plain series still converges for y < 1
            out[high] = _series_stable(a, b, c, yh, np.log(wh))[0]
        else:
            value, loss = _connection(a, b, c, yh, wh)
            mid = yh <= DIRECT_SERIES_MAX_Y
            if np.any(mid):
                direct, dloss = _series_stable(a, b, c, yh[mid], np.log(wh[mid]))
                better = dloss < loss[mid]
                value[mid] = np.where(better, direct, value[mid])
            out[high] = value
    return complex(out[0]) if scalar else out


def hyp2f1(a, b, c, y):
    """Gauss hypergeometric function for complex parameters, real ``0 <= y < 1``.

    Raises
    ------
    HypergeometricParameterError
        If ``c`` lies within 1e-8 of a non-positive integer.
    NonConvergenceError
        If a series needs more than 10,000 terms.
    """
    y = np.asarray(y, dtype=float)
    return hyp2f1_pair(a, b, c, y, 1.0 - y)
