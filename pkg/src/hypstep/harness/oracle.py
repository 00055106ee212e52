"""Direct numerical integration of the stationary Schroedinger equation.

This is the independent check on the closed-form amplitudes: it only shares
the potential evaluator with the analytic code. The equation
``psi'' = (V(x) - k^2) psi`` is integrated with DOP853 from ``x = +L`` (pure
transmitted wave) to ``x = -L``, where the solution is split into incident
and reflected plane waves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DomainError, OracleError
from ..model import PotentialParams, potential

__all__ = ["OracleResult", "ode_oracle", "default_box"]

RTOL = 1e-10
ATOL = 1e-12
# |V(-L)| / V0 ~ exp(-L/alpha) < 1e-14 needs L > 32.3 alpha
BOX_FACTOR = 36.0
THRESHOLD_EXCLUSION = 1e-9


@dataclass(frozen=True)
class OracleResult:
    k: float
    r_numeric: complex
    t_numeric: complex
    residual: float
    step_count: int


def default_box(p: PotentialParams) -> float:
    return BOX_FACTOR * p.alpha


def ode_oracle(
    k: float,
    p: PotentialParams,
    potential_override: Callable[[np.ndarray], np.ndarray] | None = None,
    L: float | None = None,
    rtol: float = RTOL,
) -> OracleResult:
    """Reflection and transmission amplitudes by numerical integration.

    Parameters
    ----------
    k : float
        Incident momentum, ``k > 0`` and away from ``sqrt(V0)``.
    p : PotentialParams
        Sets the asymptotic levels (0 on the left, ``V0`` on the right).
    potential_override : callable, optional
        Replacement potential with the same asymptotic levels (e.g. a
        SUSY partner).
    L : float, optional
        Half-width of the integration box; defaults to ``36 alpha``.

    Returns
    -------
    OracleResult
        ``t`` is referenced to ``exp(i k' x)`` and ``r`` to ``exp(-ikx)``;
        ``residual`` is the flux defect ``|(k'/k)|t|^2 + |r|^2 - 1|`` above
        threshold and ``||r|^2 - 1|`` below.
    """
    k = float(k)
    if not k > 0.0:
        raise DomainError(f"oracle needs k > 0, got {k}")
    if p.V0 > 0.0 and abs(k - math.sqrt(p.V0)) < THRESHOLD_EXCLUSION:
        raise DomainError("oracle evaluated at the threshold")
    L = default_box(p) if L is None else float(L)
    if L < 20.0 * p.alpha:
        raise DomainError("integration box must satisfy L >= 20 alpha")
    V = (lambda x: potential(x, p)) if potential_override is None else potential_override
    kp = complex(np.sqrt(complex(k * k - p.V0)))
    if kp.real == 0.0:
        kp = complex(0.0, abs(kp.imag))
    e = k * k

    def rhs(x, y):
        return [y[1], (float(V(x)) - e) * y[0]]

    sol = solve_ivp(
        rhs,
        (L, -L),
        np.array([1.0 + 0j, 1j * kp]),
        method="DOP853",
        rtol=rtol,
        atol=ATOL,
    )
    if not sol.success:
        raise OracleError(f"integration failed: {sol.message}")
    psi, dpsi = sol.y[0, -1], sol.y[1, -1]
    x0 = -L
    A = (1j * k * psi + dpsi) / (2j * k) * np.exp(-1j * k * x0)
    B = (1j * k * psi - dpsi) / (2j * k) * np.exp(1j * k * x0)
    C = np.exp(-1j * kp * L)
    t = complex(C / A)
    r = complex(B / A)
    if kp.imag == 0.0:
        residual = abs((kp.real / k) * abs(t) ** 2 + abs(r) ** 2 - 1.0)
    else:
        residual = abs(abs(r) ** 2 - 1.0)
    return OracleResult(k=k, r_numeric=r, t_numeric=t, residual=float(residual), step_count=len(sol.t) - 1)
