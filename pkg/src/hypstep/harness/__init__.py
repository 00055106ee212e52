"""Command-line interface, numerical ODE oracle and self-verification suite."""

from .oracle import OracleResult, ode_oracle

__all__ = ["OracleResult", "ode_oracle"]
