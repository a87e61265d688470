"""Command-line front end.

Subcommands: ``steady``, ``evolve``, ``sweep``, ``oracle``, ``compare``.
Tables go to ``--output`` (or stdout) as CSV with a ``# key = value`` echo
of the effective configuration; diagnostics go to stderr.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
3 non-convergence (results still written and flagged).
"""

from __future__ import annotations

import argparse
import contextlib
import io
import logging
import math
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, config_echo, parse_config
from .dressed import DressedState, auto_truncate, evolve, steady_state
from .errors import SolverError
from .model import derive_dressed, secular_check
from .observables import UNDEFINED, emitter_summary, g2, mean_photon
from .oracle import oracle_steady
from .sweep import locate_minimum, run_sweep

log = logging.getLogger("ladder_cavity")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_UNCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value):
    """Shortest round-trip text for numbers; ``undefined`` for a missing g2."""
    if value is UNDEFINED:
        return "undefined"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(stream, cfg: RunConfig, header, rows):
    for line in config_echo(cfg):
        stream.write(f"# {line}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        buf = io.StringIO()
        yield buf
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _secular(cfg: RunConfig, dressed):
    return secular_check(cfg.params, dressed, warn=cfg.secular_warn,
                         violation=cfg.secular_violation)


def _dressed_steady(cfg: RunConfig, n_max):
    dressed = derive_dressed(cfg.params)
    if n_max is None:
        res = auto_truncate(dressed, cfg.params.kappa, cfg.solver)
        return dressed, res.state, res.n_max, res.converged
    state = steady_state(dressed, cfg.params.kappa, cfg.solver, n_max)
    return dressed, state, n_max, state.tail < cfg.solver.tail_tol


def cmd_steady(cfg: RunConfig, args):
    dressed, state, n_max, converged = _dressed_steady(cfg, args.nmax)
    mean, g = mean_photon(state), g2(state)
    p1, p2 = emitter_summary(state)
    report = _secular(cfg, dressed)
    print(f"mean_n = {fmt(mean)}")
    print(f"g2 = {fmt(g)}")
    print(f"n_max_used = {n_max}")
    print(f"converged = {fmt(converged)}")
    print(f"g_abs = {fmt(dressed.g_abs)}")
    print(f"secular = {report}")
    if args.output:
        with _open_output(args.output) as out:
            write_csv(out, cfg, ["mean_n", "g2", "n_max_used", "converged", "sum_p1", "sum_p2"],
                      [[mean, g, n_max, converged, p1, p2]])
    if not converged:
        log.warning("steady: Fock truncation not converged (n_max = %d)", n_max)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _output_times(tmax, stride):
    if not tmax > 0:
        raise UsageError("--tmax must be > 0")
    if not stride > 0:
        raise UsageError("--stride must be > 0")
    count = int(math.floor(tmax / stride + 1e-9))
    times = [k * stride for k in range(count + 1)]
    if tmax - times[-1] > 1e-9 * tmax:
        times.append(tmax)
    return times


def cmd_evolve(cfg: RunConfig, args):
    dressed = derive_dressed(cfg.params)
    times = _output_times(args.tmax, args.stride)
    n_max = args.nmax or cfg.solver.n_max_initial
    traj = evolve(DressedState.vacuum(n_max), dressed, cfg.params.kappa, times[-1],
                  cfg.solver, times=times)
    rows = []
    for s in traj:
        p1, p2 = emitter_summary(s)
        rows.append([s.time, mean_photon(s), g2(s), s.trace, p1, p2, s.n_max])
    with _open_output(args.output) as out:
        write_csv(out, cfg, ["t", "mean_n", "g2", "trace", "sum_p1", "sum_p2", "n_max"], rows)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args):
    spec = cfg.sweep_spec()
    result = run_sweep(spec, workers=args.workers)
    header = [spec.param_x.value, spec.param_y.value, "mean_n", "g2", "n_max_used", "converged"]
    rows = []
    for ix, iy, x, y in result.rows():
        rows.append([x, y, result.mean_n[ix, iy], result.g2_value(ix, iy),
                     result.n_max_used[ix, iy], bool(result.converged[ix, iy])])
    with _open_output(args.output) as out:
        write_csv(out, cfg, header, rows)
    n_failed = int(result.failed.sum())
    n_unconv = int((~result.converged).sum())
    try:
        ix, iy, m = locate_minimum(result)
        log.info("minimum mean_n = %r at %s = %r, %s = %r", m, spec.param_x.value,
                 float(spec.x_values[ix]), spec.param_y.value, float(spec.y_values[iy]))
    except SolverError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    if n_failed or n_unconv:
        log.warning("sweep: %d failed and %d unconverged cells", n_failed, n_unconv)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _oracle(cfg: RunConfig, args):
    n_max = args.nmax or cfg.oracle_n_max
    state = oracle_steady(cfg.oracle_params, n_max)
    return state, n_max


def cmd_oracle(cfg: RunConfig, args):
    state, n_max = _oracle(cfg, args)
    mean, g = mean_photon(state), g2(state)
    tail = abs(float(np.real(np.diagonal(state.rho)).reshape(-1, n_max + 1).sum(axis=0)[-1]))
    print(f"mean_n = {fmt(mean)}")
    print(f"g2 = {fmt(g)}")
    print(f"n_max = {n_max}")
    print(f"delta_c = {fmt(cfg.oracle_params.detuning)}")
    print(f"trace = {fmt(state.trace)}")
    print(f"min_eigenvalue = {fmt(state.min_eigenvalue())}")
    print(f"hermiticity_error = {fmt(state.hermiticity_error())}")
    print(f"tail = {fmt(tail)}")
    if args.output:
        with _open_output(args.output) as out:
            write_csv(out, cfg, ["mean_n", "g2", "n_max", "trace", "min_eigenvalue"],
                      [[mean, g, n_max, state.trace, state.min_eigenvalue()]])
    if tail > cfg.solver.tail_tol:
        log.warning("oracle: tail mass %.3e above tail_tol; raise --nmax", tail)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _rel(a, b):
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    return abs(a - b) / max(abs(b), 1e-300) if a != b else 0.0


def cmd_compare(cfg: RunConfig, args):
    dressed, dstate, n_max, converged = _dressed_steady(cfg, None)
    ostate, on_max = _oracle(cfg, args)
    dm, om = mean_photon(dstate), mean_photon(ostate)
    dg, og = g2(dstate), g2(ostate)
    report = _secular(cfg, dressed)
    print(f"dressed_mean_n = {fmt(dm)}")
    print(f"oracle_mean_n = {fmt(om)}")
    print(f"rel_diff_mean_n = {fmt(_rel(dm, om))}")
    print(f"dressed_g2 = {fmt(dg)}")
    print(f"oracle_g2 = {fmt(og)}")
    print(f"rel_diff_g2 = {fmt(_rel(dg, og))}")
    print(f"dressed_n_max = {n_max}")
    print(f"oracle_n_max = {on_max}")
    print(f"coupling_ratio = {fmt(report.coupling_ratio)}")
    print(f"decay_ratio = {fmt(report.decay_ratio)}")
    print(f"secular = {report.severity.value}")
    if args.output:
        with _open_output(args.output) as out:
            write_csv(out, cfg, ["dressed_mean_n", "oracle_mean_n", "rel_diff_mean_n",
                                 "dressed_g2", "oracle_g2", "coupling_ratio", "decay_ratio"],
                      [[dm, om, _rel(dm, om), dg, og, report.coupling_ratio, report.decay_ratio]])
    return EXIT_OK if converged else EXIT_UNCONVERGED


COMMANDS = {
    "steady": cmd_steady,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def build_parser():
    parser = _Parser(prog="ladder-cavity",
                     description="Cavity field of a driven three-level ladder emitter.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--output", metavar="PATH")
        p.add_argument("--workers", type=int, default=1, metavar="N")
        p.add_argument("--tmax", type=float, default=50.0, metavar="T")
        p.add_argument("--stride", type=float, default=1.0, metavar="DT")
        p.add_argument("--nmax", type=int, metavar="N")
        p.add_argument("--profile", choices=["fast", "paper"])
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s: %(message)s",
                        level=logging.WARNING)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.verbose:
        logging.getLogger().setLevel(logging.INFO)
    if args.nmax is not None and args.nmax < 1:
        print("usage error: --nmax must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text).with_profile(args.profile)
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error in {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
