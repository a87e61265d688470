"""Reduced dressed-state equations on a truncated Fock ladder.

Projecting the secular master equation onto the emitter dressed states and
then onto cavity Fock states leaves five real sequences per photon number:

* ``p0[n]`` -- photon-number distribution (emitter traced out),
* ``p1[n]`` -- population of ``|+>`` plus ``|->``,
* ``p2[n]`` -- population of ``|+>`` minus ``|->``,
* ``p3[n]``, ``p4[n]`` -- phase-stripped emitter/cavity coherences, with
  ``p4[n] == p3[n + 1]`` for every physical state.

The state vector interleaves the five sequences photon number by photon
number (index ``5 * n + k``), so the generator is banded.

Truncation: terms that need Fock index ``n_max + 1`` are dropped. ``p4[n_max]``
refers to a coherence with ``|n_max + 1>`` and therefore keeps only its self
damping; with that choice the total probability is conserved exactly.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (
    ConvergenceError,
    ParameterError,
    SingularSystemError,
    StiffnessError,
    TruncationOverflow,
)
from .model import DressedParams

log = logging.getLogger(__name__)

__all__ = [
    "NVARS",
    "DressedState",
    "SteadyMethod",
    "SolverConfig",
    "TruncationResult",
    "generator",
    "evolve",
    "steady_state",
    "auto_truncate",
]

NVARS = 5
EPS_NUM = 1e-10


@dataclass
class DressedState:
    """Fock-resolved reduced variables at one instant."""

    n_max: int
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        for name in ("p0", "p1", "p2", "p3", "p4"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.n_max + 1,):
                raise ParameterError(
                    f"{name} has shape {arr.shape}, expected ({self.n_max + 1},)")
            setattr(self, name, arr)

    @classmethod
    def vacuum(cls, n_max, time=0.0):
        """Empty cavity, emitter in the central dressed state ``|0>``."""
        return cls.from_photon_distribution(np.eye(1, n_max + 1).ravel(), time=time)

    @classmethod
    def from_photon_distribution(cls, pn, time=0.0):
        """Seed a state with photon distribution ``pn`` and the emitter in ``|0>``."""
        pn = np.asarray(pn, dtype=float)
        if pn.ndim != 1 or pn.size < 2:
            raise ParameterError("photon distribution needs at least two entries")
        zeros = np.zeros_like(pn)
        return cls(pn.size - 1, pn, zeros, zeros, zeros, zeros, time)

    @classmethod
    def from_vector(cls, x, time=0.0):
        blocks = np.asarray(x, dtype=float).reshape(-1, NVARS).T
        return cls(blocks.shape[1] - 1, *blocks, time=time)

    def to_vector(self):
        return np.stack([self.p0, self.p1, self.p2, self.p3, self.p4], axis=1).ravel()

    def padded(self, n_max):
        """Same state embedded in a larger Fock space."""
        if n_max < self.n_max:
            raise ParameterError("cannot pad to a smaller n_max")
        extra = n_max - self.n_max
        arrays = [np.pad(getattr(self, k), (0, extra)) for k in ("p0", "p1", "p2", "p3", "p4")]
        return DressedState(n_max, *arrays, time=self.time)

    @property
    def trace(self):
        return float(self.p0.sum())

    @property
    def tail(self):
        """Probability carried by the highest retained Fock state."""
        return abs(float(self.p0[-1]))

    def invariant_violations(self, eps=1e-8):
        """Return a dict of invariant name -> worst violation exceeding ``eps``."""
        checks = {
            "trace": abs(self.trace - 1.0),
            "p0_nonnegative": max(0.0, -float(self.p0.min())),
            "p1_nonnegative": max(0.0, -float(self.p1.min())),
            "p1_le_p0": max(0.0, float((self.p1 - self.p0).max())),
            "abs_p2_le_p1": max(0.0, float((np.abs(self.p2) - self.p1).max())),
            "p3_vacuum": abs(float(self.p3[0])),
            "p4_shift": float(np.abs(self.p4[:-1] - self.p3[1:]).max(initial=0.0)),
        }
        return {k: v for k, v in checks.items() if v > eps}


class SteadyMethod(enum.Enum):
    LINEAR_SOLVE = "LINEAR_SOLVE"
    LONG_TIME = "LONG_TIME"


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings shared by the dressed-state routines.

    ``max_steps`` bounds the number of implicit steps taken by the
    ``LONG_TIME`` steady-state march.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    tail_tol: float = 1e-10
    n_max_initial: int = 16
    n_max_cap: int = 4096
    steady_method: SteadyMethod = SteadyMethod.LINEAR_SOLVE
    integrator: str = "DOP853"
    max_steps: int = 400

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        if self.n_max_initial < 1:
            raise ParameterError("n_max_initial must be >= 1")
        if self.n_max_initial > self.n_max_cap:
            raise ParameterError("n_max_initial must not exceed n_max_cap")
        if self.integrator not in ("RK45", "DOP853", "RK23"):
            raise ParameterError(f"integrator must be an explicit embedded pair, got {self.integrator!r}")
        if isinstance(self.steady_method, str):
            object.__setattr__(self, "steady_method", SteadyMethod(self.steady_method))


def _generator_coo(dressed: DressedParams, kappa, n_max):
    g = dressed.g_abs
    alpha, beta, zeta = dressed.alpha, dressed.beta, dressed.zeta
    n = np.arange(n_max + 1, dtype=float)
    lo = n[1:]            # photon numbers that have a lower neighbour
    hi = n[:-1]           # photon numbers that have an upper neighbour
    ni = np.arange(n_max + 1)
    up = ni[:-1]
    rows, cols, vals = [], [], []

    def put(k_row, n_row, k_col, n_col, v):
        rows.append(NVARS * n_row + k_row)
        cols.append(NVARS * n_col + k_col)
        vals.append(np.broadcast_to(v, n_row.shape).astype(float))

    # p0, p1, p2: coupling to the coherences plus cavity decay ladder
    for k, sign3 in ((0, 1.0), (1, 1.0), (2, -1.0)):
        put(k, ni, 4, ni, -2 * g)
        put(k, ni, 3, ni, sign3 * 2 * g)
        put(k, up, k, up + 1, kappa * (hi + 1))
    put(0, ni, 0, ni, -kappa * n)
    put(1, ni, 1, ni, -(kappa * n + alpha / 2))
    put(1, ni, 0, ni, dressed.pump)
    put(2, ni, 2, ni, -(kappa * n + beta / 2))

    # p3
    put(3, ni[1:], 1, ni[1:] - 1, g * lo / 2)
    put(3, ni[1:], 2, ni[1:] - 1, g * lo / 2)
    put(3, ni, 1, ni, -g * n / 2)
    put(3, ni, 2, ni, g * n / 2)
    put(3, ni, 4, ni, -kappa)
    put(3, up, 3, up + 1, kappa * (hi + 1))
    put(3, ni, 3, ni, -(kappa * (n - 0.5) + zeta))

    # p4; the coupling row is absent at n_max (it involves |n_max + 1>)
    h = g * (hi + 1) / 2
    put(4, up, 2, up + 1, h)
    put(4, up, 2, up, h)
    put(4, up, 1, up + 1, -h)
    put(4, up, 1, up, h)
    put(4, up, 4, up + 1, kappa * (hi + 1))
    put(4, ni, 4, ni, -(kappa * (n + 0.5) + zeta))

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    keep = vals != 0
    return rows[keep], cols[keep], vals[keep]


def generator(dressed: DressedParams, kappa, n_max):
    """Sparse matrix of the reduced equations on ``5 * (n_max + 1)`` variables.

    Only ``|g|`` enters; the phase of the effective coupling is absorbed into
    the coherence variables.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if not kappa > 0:
        raise ParameterError("kappa must be > 0")
    size = NVARS * (n_max + 1)
    rows, cols, vals = _generator_coo(dressed, kappa, n_max)
    return sp.csr_matrix((vals, (rows, cols)), shape=(size, size))


def evolve(initial: DressedState, dressed: DressedParams, kappa, t_final,
           config: SolverConfig | None = None, times=None):
    """Integrate the reduced equations from ``initial`` up to ``t_final``.

    Parameters
    ----------
    initial : DressedState
        Starting state; its ``time`` is the start time.
    t_final : float
        Absolute end time.
    times : array_like, optional
        Increasing output times in ``[initial.time, t_final]``. Defaults to
        ``[t_final]``. States are obtained from the integrator's dense output.

    Returns
    -------
    list of DressedState
        One state per output time. The Fock space is doubled (up to
        ``config.n_max_cap``) whenever the tail mass exceeds ``tail_tol``, so
        later states may carry a larger ``n_max``.
    """
    config = config or SolverConfig()
    t0 = float(initial.time)
    if times is None:
        times = [t_final]
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ParameterError("times must be a non-empty 1-D sequence")
    if np.any(np.diff(times) <= 0) or times[0] < t0 or times[-1] > t_final:
        raise ParameterError("times must increase within [initial.time, t_final]")

    pending = list(times)
    out = []
    state = initial
    while pending:
        if pending[0] == state.time:
            out.append(state)
            pending.pop(0)
            continue
        A = generator(dressed, kappa, state.n_max)
        sol = solve_ivp(lambda t, y: A @ y, (state.time, pending[-1]), state.to_vector(),
                        method=config.integrator, t_eval=pending,
                        rtol=config.rel_tol, atol=config.abs_tol)
        if sol.status < 0:
            reached = float(sol.t[-1]) if sol.t.size else state.time
            raise StiffnessError(sol.message, reached)
        grown = False
        for j, t in enumerate(sol.t):
            s = DressedState.from_vector(sol.y[:, j], float(t))
            if s.tail > config.tail_tol:
                n_new = min(2 * state.n_max, config.n_max_cap)
                if n_new == state.n_max:
                    raise TruncationOverflow("tail mass above tail_tol at n_max_cap",
                                             state.n_max, s.tail)
                log.debug("t=%g: growing n_max %d -> %d", t, state.n_max, n_new)
                state = state.padded(n_new)
                grown = True
                break
            out.append(s)
            state = s
            pending.pop(0)
        if not grown and pending:
            raise ConvergenceError("integrator stopped before the last output time")
    return out


def _pinned_system(dressed, kappa, n_max):
    """Generator with the normalisation and the structural zeros imposed.

    Row ``p0[0]`` is replaced by ``sum(p0) = 1``; rows ``p3[0]`` and
    ``p4[n_max]`` are replaced by ``x = 0`` since both vanish identically.
    """
    size = NVARS * (n_max + 1)
    rows, cols, vals = _generator_coo(dressed, kappa, n_max)
    i_p3_0 = 3
    i_p4_top = NVARS * n_max + 4
    keep = (rows != 0) & (rows != i_p3_0) & (rows != i_p4_top)
    norm_cols = NVARS * np.arange(n_max + 1)
    rows = np.concatenate([rows[keep], np.zeros(n_max + 1, int), [i_p3_0, i_p4_top]])
    cols = np.concatenate([cols[keep], norm_cols, [i_p3_0, i_p4_top]])
    vals = np.concatenate([vals[keep], np.ones(n_max + 1), [1.0, 1.0]])
    M = sp.csc_matrix((vals, (rows, cols)), shape=(size, size))
    b = np.zeros(size)
    b[0] = 1.0
    return M, b


def _solve_linear(dressed, kappa, n_max):
    M, b = _pinned_system(dressed, kappa, n_max)
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(M, b)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(f"steady-state system is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("steady-state solve returned non-finite values")
    return x


def _solve_long_time(dressed, kappa, n_max, config):
    # Implicit Euler is L-stable and its fixed point is the exact null vector,
    # so geometrically growing steps march to the attractor cheaply.
    A = generator(dressed, kappa, n_max).tocsc()
    x = DressedState.vacuum(n_max).to_vector()
    eye = sp.identity(A.shape[0], format="csc")
    h = 1.0 / max(1.0, float(np.abs(A.diagonal()).max()))
    t = 0.0
    for _ in range(config.max_steps):
        x = spla.splu((eye - h * A).tocsc()).solve(x)
        t += h
        if not np.all(np.isfinite(x)):
            raise SingularSystemError("long-time march produced non-finite values")
        if float(np.abs(A @ x).max()) < config.abs_tol:
            return x, t
        h *= 2.0
    raise ConvergenceError(
        f"LONG_TIME did not reach |dx/dt| < {config.abs_tol:g} in {config.max_steps} steps")


def steady_state(dressed: DressedParams, kappa, config: SolverConfig | None = None,
                 n_max=None) -> DressedState:
    """Stationary solution of the reduced equations at fixed truncation.

    ``LINEAR_SOLVE`` solves the generator with one redundant row replaced by
    the normalisation. ``LONG_TIME`` marches from the vacuum with implicit
    steps until the time derivative falls below ``abs_tol``.
    """
    config = config or SolverConfig()
    n_max = config.n_max_initial if n_max is None else int(n_max)
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if not kappa > 0:
        raise ParameterError("kappa must be > 0")
    if config.steady_method is SteadyMethod.LINEAR_SOLVE:
        x = _solve_linear(dressed, kappa, n_max)
        t = float("inf")
    else:
        x, t = _solve_long_time(dressed, kappa, n_max, config)
    return DressedState.from_vector(x, time=t)


@dataclass
class TruncationResult:
    state: DressedState
    n_max: int
    converged: bool
    history: list = field(default_factory=list)


def _mean(state):
    return float(np.dot(np.arange(state.n_max + 1), state.p0))


def auto_truncate(dressed: DressedParams, kappa, config: SolverConfig | None = None):
    """Steady state with the Fock cutoff chosen adaptively.

    ``n_max`` doubles from ``n_max_initial`` until two consecutive solves agree
    on the mean photon number to ``rel_tol`` (relative to ``max(<n>, 1)``) and
    the coarser solve has tail mass below ``tail_tol``. The coarser, confirmed
    state is returned. If ``n_max_cap`` is reached first, the finest state is
    returned with ``converged=False``.
    """
    config = config or SolverConfig()
    n_max = config.n_max_initial
    prev = steady_state(dressed, kappa, config, n_max)
    history = [(n_max, _mean(prev), prev.tail)]
    while n_max < config.n_max_cap:
        n_max = min(2 * n_max, config.n_max_cap)
        cur = steady_state(dressed, kappa, config, n_max)
        history.append((n_max, _mean(cur), cur.tail))
        m_prev, m_cur = _mean(prev), _mean(cur)
        if abs(m_cur - m_prev) / max(abs(m_cur), 1.0) < config.rel_tol and prev.tail < config.tail_tol:
            return TruncationResult(prev, prev.n_max, True, history)
        prev = cur
    log.warning("auto_truncate: not converged at n_max_cap = %d", config.n_max_cap)
    return TruncationResult(prev, prev.n_max, False, history)


def with_method(config: SolverConfig, method: SteadyMethod) -> SolverConfig:
    return replace(config, steady_method=method)
