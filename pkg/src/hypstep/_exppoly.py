"""Exponential polynomials ``exp(rate*u) * sum_m c_m exp(m*u)`` with ``u = x/alpha``.

Anti-bound wavefunctions at the pole momenta reduce to this form, and the
class is closed under differentiation, products and sums of equal base
rate, so Wronskians and their log-derivatives are exact.
"""

from __future__ import annotations

import itertools

import numpy as np
from numpy.polynomial import polynomial as P

_RATE_TOL = 1e-12


class ExpPoly:
    __slots__ = ("rate", "coeffs", "alpha")

    def __init__(self, rate, coeffs, alpha=1.0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        nz = np.flatnonzero(c)
        if nz.size == 0:
            c, rate = np.zeros(1), float(rate)
        else:
            rate = float(rate) + nz[0]
            c = c[nz[0] : nz[-1] + 1]
        self.rate = rate
        self.coeffs = c
        self.alpha = float(alpha)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not np.any(self.coeffs)

    def derivative(self):
        m = np.arange(len(self.coeffs))
        return ExpPoly(self.rate, (self.rate + m) * self.coeffs / self.alpha, self.alpha)

    def scaled(self, factor):
        return ExpPoly(self.rate, self.coeffs * factor, self.alpha)

    def __neg__(self):
        return self.scaled(-1.0)

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return self.scaled(float(other))
        return ExpPoly(self.rate + other.rate, P.polymul(self.coeffs, other.coeffs), self.alpha)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        offset = other.rate - self.rate
        shift = round(offset)
        if abs(offset - shift) > _RATE_TOL * max(1.0, abs(offset)):
            raise ValueError("exponential polynomials with incommensurate rates")
        lo = min(0, shift)
        a = np.concatenate([np.zeros(-lo if lo < 0 else 0), self.coeffs]) if lo < 0 else self.coeffs
        b = np.concatenate([np.zeros(shift - lo), other.coeffs])
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        return ExpPoly(self.rate + lo, a + b, self.alpha)

    def __sub__(self, other):
        return self + (-other)

    def _scaled_sums(self, x, powers):
        """Sums ``sum_m m^p c_m s^m`` divided by ``s^degree`` when ``s > 1``."""
        u = np.asarray(x, dtype=float) / self.alpha
        m = np.arange(len(self.coeffs), dtype=float)
        d = self.degree
        pos = u > 0
        s = np.exp(np.where(pos, 0.0, u))
        t = np.exp(-np.where(pos, u, 0.0))
        out = []
        for p in powers:
            w = m**p * self.coeffs
            low = P.polyval(s, w)
            high = P.polyval(t, w[::-1])
            out.append(np.where(pos, high, low))
        log_scale = np.where(pos, d * u, 0.0)
        return u, log_scale, out

    def log_abs(self, x):
        """Return ``(log|f|, sign f)``; overflow-free for large ``|x|``."""
        u, log_scale, (s0,) = self._scaled_sums(x, (0,))
        with np.errstate(divide="ignore"):
            return self.rate * u + log_scale + np.log(np.abs(s0)), np.sign(s0)

    def __call__(self, x):
        la, sg = self.log_abs(x)
        return sg * np.exp(la)

    def log_derivatives(self, x):
        """Return ``(f'/f, f''/f)`` evaluated without forming ``f`` itself."""
        _, _, (s0, s1, s2) = self._scaled_sums(x, (0, 1, 2))
        g = self.rate
        d1 = s1 / s0
        d2 = s2 / s0
        return (g + d1) / self.alpha, (g * g + 2 * g * d1 + d2) / self.alpha**2

    def log_second_derivative(self, x):
        """``(log f)''`` (the base rate drops out)."""
        _, _, (s0, s1, s2) = self._scaled_sums(x, (0, 1, 2))
        d1 = s1 / s0
        return (s2 / s0 - d1 * d1) / self.alpha**2

    def positive_roots(self, tol=1e-9):
        """Real positive roots ``s`` of the polynomial part (zeros at ``x = alpha*log s``)."""
        if self.degree < 1:
            return np.array([])
        roots = P.polyroots(self.coeffs)
        real = roots[np.abs(roots.imag) <= tol * np.maximum(1.0, np.abs(roots))].real
        return np.sort(real[real > 0])


def wronskian(funcs):
    """Wronskian ``det[f_j^(i)]`` of exponential polynomials, by Leibniz expansion."""
    n = len(funcs)
    rows = [list(funcs)]
    for _ in range(1, n):
        rows.append([f.derivative() for f in rows[-1]])
    total = ExpPoly(sum(f.rate for f in funcs), [0.0], funcs[0].alpha)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        total = total + (-term if inversions % 2 else term)
    return total
