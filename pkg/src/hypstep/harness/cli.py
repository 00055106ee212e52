"""``hypstep`` command-line interface.

Every subcommand writes one table. CSV output starts with a single
``#``-prefixed JSON line holding the column names, the run configuration and
any metadata, followed by the rows with 17 significant digits. JSON output
carries the same fields plus ``rows`` (NaN becomes ``null``).

Exit status: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..delay import classical_delays, phase_curve, wigner_delay_at
from ..errors import ConfigError, HypstepError
from ..model import PotentialParams, antibound_wavefunction, potential, wavefunction
from ..scattering import (
    antibound_momenta,
    pole_admissibility_check,
    pole_winding_probe,
    transmission_amplitude,
)
from ..susy import partner_amplitudes, susy_chain

__all__ = ["RunConfig", "main", "run_cli", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
COMMANDS = ("scatter", "poles", "wavefunction", "susy", "delay", "classical", "verify")
GRID_EXCLUSION = 1e-6


@dataclass
class RunConfig:
    command: str
    v0: float = 0.5
    alpha: float = 1.0
    kmin: float = 0.05
    kmax: float = 5.0
    points: int = 200
    order: int = 0
    nmax: int = 6
    xmin: float = -10.0
    xmax: float = 10.0
    emin: float = 0.05
    emax: float = 2.0
    d: float | None = None
    k: float = 1.2
    antibound: int | None = None
    winding: bool = False
    workers: int = 1
    format: str = "csv"
    out: str | None = None
    exclusions: list = field(default_factory=list)

    @property
    def params(self) -> PotentialParams:
        return PotentialParams(self.v0, self.alpha)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not (math.isfinite(self.v0) and self.v0 >= 0):
            raise ConfigError("--v0 must be a finite number >= 0")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError("--alpha must be a finite number > 0")
        if self.points < 2:
            raise ConfigError("--points must be at least 2")
        if self.order < 0:
            raise ConfigError("--order must be >= 0")
        if self.nmax < 1:
            raise ConfigError("--nmax must be >= 1")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        grids = {
            "scatter": ("kmin", "kmax"),
            "delay": ("kmin", "kmax"),
            "wavefunction": ("xmin", "xmax"),
            "susy": ("xmin", "xmax"),
            "classical": ("emin", "emax"),
        }
        if self.command in grids:
            lo, hi = grids[self.command]
            if not getattr(self, lo) < getattr(self, hi):
                raise ConfigError(f"--{lo} must be smaller than --{hi}")
        if self.command in ("scatter", "delay") and self.kmin <= 0:
            raise ConfigError("--kmin must be > 0")
        if self.command == "classical":
            if self.emin <= 0:
                raise ConfigError("--emin must be > 0")
            if self.v0 <= 0:
                raise ConfigError("classical delays need --v0 > 0")
        if self.command == "wavefunction" and self.antibound is None and not self.k > 0:
            raise ConfigError("--k must be > 0")
        return self

    def as_dict(self):
        return {k: v for k, v in sorted(vars(self).items()) if k not in ("out", "workers", "exclusions")}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hypstep", description="Scattering off the hyperbolic step potential.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--v0", type=float, default=0.5, help="barrier height V0 (default 0.5)")
    common.add_argument("--alpha", type=float, default=1.0, help="width alpha (default 1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for per-point work")
    kgrid = _Parser(add_help=False)
    kgrid.add_argument("--kmin", type=float, default=0.05)
    kgrid.add_argument("--kmax", type=float, default=5.0)
    kgrid.add_argument("--points", type=int, default=200)
    kgrid.add_argument("--order", type=int, default=0, help="SUSY chain order (0 = base potential)")
    xgrid = _Parser(add_help=False)
    xgrid.add_argument("--xmin", type=float, default=-10.0)
    xgrid.add_argument("--xmax", type=float, default=10.0)
    xgrid.add_argument("--points", type=int, default=401)

    sub.add_parser("scatter", parents=[common, kgrid], help="amplitudes, coefficients, phases, flux")
    p = sub.add_parser("poles", parents=[common], help="anti-bound pole ladder")
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--winding", action="store_true", help="add the winding of 1/t around each pole")
    p = sub.add_parser("wavefunction", parents=[common, xgrid], help="scattering or anti-bound wavefunction")
    p.add_argument("--k", type=float, default=1.2, help="incident momentum")
    p.add_argument("--antibound", type=int, help="anti-bound index n instead of a scattering state")
    p = sub.add_parser("susy", parents=[common, xgrid], help="partner potential and bound states")
    p.add_argument("--order", type=int, default=1)
    p = sub.add_parser("delay", parents=[common, kgrid], help="Wigner delays for chain orders 0..order")
    p = sub.add_parser("classical", parents=[common], help="classical reflection/transmission delays")
    p.add_argument("--emin", type=float, default=0.05)
    p.add_argument("--emax", type=float, default=2.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--d", type=float, help="start distance (default 40 alpha)")
    sub.add_parser("verify", parents=[common], help="run the self-verification suite")
    return parser


# ---------------------------------------------------------------- tables


def _k_grid(cfg):
    k = np.linspace(cfg.kmin, cfg.kmax, cfg.points)
    if cfg.v0 > 0:
        k = k[np.abs(k - math.sqrt(cfg.v0)) >= GRID_EXCLUSION]
    if k.size < 2:
        raise ConfigError("grid is empty after removing the threshold neighbourhood")
    return k


def _scatter(cfg):
    p = cfg.params
    k = _k_grid(cfg)
    r, t = partner_amplitudes(k, cfg.order, p)
    R, T = np.abs(r) ** 2, np.abs(t) ** 2
    kp = np.sqrt(np.maximum(k * k - p.V0, 0.0))
    flux = np.where(k > p.threshold, kp / k * T + R, R)
    dr = phase_curve("reflection", cfg.order, k, p).delta
    dt = phase_curve("transmission", cfg.order, k, p).delta
    cols = ["k", "R", "T", "re_r", "im_r", "re_t", "im_t", "delta_r", "delta_t", "flux"]
    rows = np.column_stack([k, R, T, r.real, r.imag, t.real, t.imag, dr, dt, flux])
    return cols, rows.tolist(), {}


def _poles(cfg):
    p = cfg.params
    cols = ["n", "im_k", "im_kprime", "E", "admissible", "certificate"]
    if cfg.winding:
        cols.append("winding")
    rows = []
    for n in range(1, cfg.nmax + 1):
        k, kp = antibound_momenta(n, p)
        ok, cert = pole_admissibility_check(n, p)
        row = [n, k.imag, kp.imag, (k * k).real, int(ok), cert.real]
        if cfg.winding:
            row.append(pole_winding_probe(n, p) if ok else float("nan"))
        rows.append(row)
    return cols, rows, {}


def _wavefunction(cfg):
    p = cfg.params
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.points)
    if cfg.antibound is not None:
        psi = np.asarray(antibound_wavefunction(cfg.antibound, x, p), dtype=complex)
        meta = {"antibound": cfg.antibound}
    else:
        # incident amplitude 1 from the left: C = t, D = 0
        t = transmission_amplitude(cfg.k, p)
        psi = np.asarray(wavefunction(x, cfg.k, t, 0.0, p), dtype=complex)
        meta = {"C": [t.real, t.imag]}
    return ["x", "re_psi", "im_psi"], np.column_stack([x, psi.real, psi.imag]).tolist(), meta


def _susy(cfg):
    p = cfg.params
    chain = susy_chain(cfg.order, p)
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.points)
    cols = ["x", "V", "V_partner", "V_partner_closed_form"]
    data = [x, potential(x, p), chain.partner_potential(x), chain.closed_form(x)]
    for b in chain.bound_states:
        cols.append(f"bound_{b.index}")
        data.append(b(x))
    meta = {
        "bound_state_energies": [b.energy for b in chain.bound_states],
        "outside_analyzed_set": chain.outside_analyzed_set,
    }
    return cols, np.column_stack(data).tolist(), meta


def _delay(cfg):
    p = cfg.params
    k = _k_grid(cfg)
    cols, data = ["k"], [k]
    window = np.abs(k - p.threshold) <= 0.05 if p.V0 > 0 else np.zeros(k.shape, bool)
    for order in range(cfg.order + 1):
        tr = np.where(window, np.nan, wigner_delay_at("reflection", order, k, p))
        tt = wigner_delay_at("transmission", order, k, p)
        tt = np.where(window | (k < p.threshold), np.nan, tt)
        cols += [f"tau_r_{order}", f"tau_t_{order}"]
        data += [tr, tt]
    return cols, np.column_stack(data).tolist(), {"threshold_window": 0.05}


def _classical_point(args):
    E, v0, alpha, d = args
    res = classical_delays(E, PotentialParams(v0, alpha), d)
    return [E, 0 if res.kind == "reflection" else 1, res.tau, res.tau_primitive, int(res.convergence_flag)]


def _classical(cfg):
    E = np.linspace(cfg.emin, cfg.emax, cfg.points)
    E = E[np.abs(E - cfg.v0) >= GRID_EXCLUSION]
    jobs = [(float(e), cfg.v0, cfg.alpha, cfg.d) for e in E]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_classical_point, jobs))
    else:
        rows = [_classical_point(j) for j in jobs]
    return ["E", "transmission", "tau_c", "tau_c_primitive", "converged"], rows, {}


def _verify(cfg):
    from .verify import run_checks

    results = run_checks()
    rows = [[r.name, r.defect, r.tolerance, int(r.passed)] for r in results]
    return ["check", "defect", "tolerance", "passed"], rows, {"all_passed": all(r.passed for r in results)}


_HANDLERS = {
    "scatter": _scatter,
    "poles": _poles,
    "wavefunction": _wavefunction,
    "susy": _susy,
    "delay": _delay,
    "classical": _classical,
    "verify": _verify,
}


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return None if not math.isfinite(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def render(cfg, cols, rows, meta) -> str:
    head = {"columns": cols, "config": _json_value(cfg.as_dict()), "meta": _json_value(meta)}
    if cfg.format == "json":
        head["rows"] = _json_value(rows)
        return json.dumps(head, sort_keys=True, allow_nan=False, indent=1) + "\n"
    lines = ["# " + json.dumps(head, sort_keys=True, allow_nan=False)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def run_cli(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the exit status."""
    cfg.validate()
    cols, rows, meta = _HANDLERS[cfg.command](cfg)
    text = render(cfg, cols, rows, meta)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.command == "verify":
        for name, defect, tol, ok in rows:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: defect {defect:.3g} (tol {tol:.3g})", file=sys.stderr)
        return EXIT_OK if meta["all_passed"] else EXIT_VERIFY
    return EXIT_OK


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(**{k: v for k, v in vars(ns).items() if v is not None or k in ("d", "antibound")})
        return run_cli(cfg)
    except ConfigError as exc:
        print(f"hypstep: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HypstepError, ArithmeticError, FloatingPointError) as exc:
        print(f"hypstep: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
