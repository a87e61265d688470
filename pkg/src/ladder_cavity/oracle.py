"""Brute-force master equation on the bare-emitter x Fock space.

This is the validation route for the secular dressed-state pipeline: the
interaction-picture Hamiltonian is kept in full (no secular approximation)
and the Lindblad generator is assembled as a sparse superoperator acting on
column-stacked density matrices. It is meant for small Fock cutoffs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import NonPhysicalStateError, ParameterError, SingularSystemError, StiffnessError
from .model import SystemParams

__all__ = [
    "NLEVELS",
    "OracleParams",
    "FullState",
    "operators",
    "hamiltonian",
    "build_liouvillian",
    "oracle_steady",
    "oracle_evolve",
    "oracle_trajectory",
    "expect",
]

NLEVELS = 3


@dataclass(frozen=True)
class OracleParams:
    """System parameters plus the cavity-laser detuning.

    ``delta_c = None`` tunes the cavity to the upper dressed sideband,
    ``+2 * sqrt(omega1**2 + omega2**2)``.
    """

    base: SystemParams
    delta_c: float | None = None

    @property
    def detuning(self):
        if self.delta_c is not None:
            return float(self.delta_c)
        return 2.0 * math.hypot(self.base.omega1, self.base.omega2)


@dataclass
class FullState:
    """Density matrix ordered ``|level> x |n>`` with the level index outermost."""

    n_max: int
    rho: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        dim = NLEVELS * (self.n_max + 1)
        if self.rho.shape != (dim, dim):
            raise ParameterError(f"rho has shape {self.rho.shape}, expected ({dim}, {dim})")

    @classmethod
    def ground(cls, n_max, time=0.0):
        """Emitter in ``|1>``, cavity in vacuum."""
        dim = NLEVELS * (n_max + 1)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return cls(n_max, rho, time)

    @classmethod
    def product(cls, emitter, photons, time=0.0):
        """Product state from a 3x3 emitter matrix and a cavity density matrix."""
        photons = np.asarray(photons, dtype=complex)
        return cls(photons.shape[0] - 1, np.kron(np.asarray(emitter, complex), photons), time)

    @property
    def trace(self):
        return float(np.real(np.trace(self.rho)))

    def hermiticity_error(self):
        return float(np.abs(self.rho - self.rho.conj().T).max())

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T)).min())

    def invariant_violations(self, herm_tol=1e-12, trace_tol=1e-8, psd_tol=1e-8):
        found = {}
        if (e := self.hermiticity_error()) > herm_tol:
            found["hermitian"] = e
        if (e := abs(self.trace - 1.0)) > trace_tol:
            found["trace"] = e
        if (e := self.min_eigenvalue()) < -psd_tol:
            found["positive"] = -e
        return found


def operators(n_max):
    """Sparse cavity annihilator and emitter projectors on the full space.

    Returns ``(a, S)`` where ``S(i, j)`` builds ``|i><j|`` for levels 1..3.
    """
    m = n_max + 1
    a_cav = sp.diags(np.sqrt(np.arange(1, m, dtype=float)), 1, format="csr")
    a = sp.kron(sp.identity(NLEVELS), a_cav, format="csr")
    eye_c = sp.identity(m, format="csr")

    def S(i, j):
        s = sp.csr_matrix(([1.0], ([i - 1], [j - 1])), shape=(NLEVELS, NLEVELS))
        return sp.kron(s, eye_c, format="csr")

    return a, S


def hamiltonian(params: OracleParams, n_max):
    """Interaction-picture Hamiltonian with both laser phases in the cavity terms."""
    p = params.base
    a, S = operators(n_max)
    ad = a.conj().T
    e1 = complex(math.cos(p.phi1), -math.sin(p.phi1))
    e2 = complex(math.cos(p.phi2), -math.sin(p.phi2))
    H = params.detuning * (ad @ a)
    H = H + p.omega1 * (S(2, 1) + S(1, 2)) + p.omega2 * (S(3, 2) + S(2, 3))
    H = H + 1j * p.g1 * (e1 * ad @ S(1, 2) - e1.conjugate() * S(2, 1) @ a)
    H = H + 1j * p.g2 * (e2 * ad @ S(2, 3) - e2.conjugate() * S(3, 2) @ a)
    return sp.csr_matrix(H)


def _dissipator(c, dim):
    eye = sp.identity(dim, format="csr")
    cdc = (c.conj().T @ c).tocsr()
    return sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)


def build_liouvillian(params: OracleParams, n_max):
    """Sparse generator acting on ``rho.flatten(order="F")``.

    Uses ``vec(A rho B) = (B^T kron A) vec(rho)``. Cavity damping at rate
    ``kappa`` and the cascade ``3 -> 2 -> 1`` at rates ``gamma2``, ``gamma1``.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    p = params.base
    dim = NLEVELS * (n_max + 1)
    eye = sp.identity(dim, format="csr")
    H = hamiltonian(params, n_max)
    a, S = operators(n_max)
    L = -1j * (sp.kron(eye, H) - sp.kron(H.T, eye))
    L = L + p.kappa * _dissipator(a, dim)
    L = L + p.gamma2 * _dissipator(S(2, 3), dim)
    L = L + p.gamma1 * _dissipator(S(1, 2), dim)
    return sp.csr_matrix(L)


def _hermitize(rho):
    return 0.5 * (rho + rho.conj().T)


def oracle_steady(params: OracleParams, n_max) -> FullState:
    """Stationary density matrix with the trace fixed to one."""
    if not params.base.kappa > 0:
        raise ParameterError("kappa must be > 0")
    dim = NLEVELS * (n_max + 1)
    L = build_liouvillian(params, n_max).tocoo()
    keep = L.row != 0
    diag_idx = np.arange(dim) * (dim + 1)
    rows = np.concatenate([L.row[keep], np.zeros(dim, int)])
    cols = np.concatenate([L.col[keep], diag_idx])
    vals = np.concatenate([L.data[keep], np.ones(dim, complex)])
    M = sp.csc_matrix((vals, (rows, cols)), shape=L.shape)
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(M, b)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(f"oracle steady system singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("oracle steady solve returned non-finite values")
    state = FullState(n_max, _hermitize(x.reshape(dim, dim, order="F")), float("inf"))
    bad = state.invariant_violations()
    if bad:
        raise NonPhysicalStateError(f"oracle steady state is not a density matrix: {bad}")
    return state


def oracle_trajectory(initial: FullState, params: OracleParams, times, *,
                      rtol=1e-10, atol=1e-12, method="DOP853"):
    """Integrate the full master equation, returning states at ``times``.

    The density matrix is re-symmetrised at every output time, which bounds
    the Hermiticity drift by the integrator round-off of a single segment.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < initial.time:
        raise ParameterError("times must increase from initial.time")
    L = build_liouvillian(params, initial.n_max)
    dim = initial.rho.shape[0]
    rho = _hermitize(initial.rho)
    t = float(initial.time)
    out = []
    for t_next in times:
        if t_next > t:
            sol = solve_ivp(lambda _t, y: L @ y, (t, t_next), rho.ravel(order="F"),
                            method=method, rtol=rtol, atol=atol)
            if sol.status < 0:
                raise StiffnessError(sol.message, float(sol.t[-1]))
            rho = _hermitize(sol.y[:, -1].reshape(dim, dim, order="F"))
            t = float(t_next)
        out.append(FullState(initial.n_max, rho.copy(), t))
    return out


def oracle_evolve(initial: FullState, params: OracleParams, t_final, **kwargs) -> FullState:
    """State at ``t_final`` (absolute time)."""
    if t_final == initial.time:
        return FullState(initial.n_max, initial.rho.copy(), initial.time)
    return oracle_trajectory(initial, params, [t_final], **kwargs)[-1]


def expect(op, state: FullState):
    """``Tr[op rho]``."""
    return complex((op @ state.rho).trace() if sp.issparse(op) else np.trace(op @ state.rho))
