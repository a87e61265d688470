"""Two-parameter steady-state maps of the cavity field."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dressed import SolverConfig, auto_truncate
from .errors import ParameterError, SolverError
from .model import SystemParams, derive_dressed
from .observables import UNDEFINED, g2, mean_photon

__all__ = [
    "SweepParam",
    "SweepSpec",
    "SweepResult",
    "grid",
    "apply_param",
    "run_sweep",
    "locate_minimum",
]


class SweepParam(enum.Enum):
    PHI2 = "phi2"
    RATIO = "ratio"
    PHI1 = "phi1"
    KAPPA = "kappa"
    G1 = "g1"
    G2 = "g2"


def grid(start, stop, count):
    """Inclusive, evenly spaced grid."""
    if count < 2:
        raise ParameterError("grid count must be >= 2")
    return np.linspace(start, stop, int(count))


def apply_param(base: SystemParams, param: SweepParam, value) -> SystemParams:
    """Return ``base`` with one swept parameter set.

    ``RATIO`` keeps ``omega1`` and sets ``omega2 = value * omega1``.
    """
    value = float(value)
    if param is SweepParam.RATIO:
        return replace(base, omega2=value * base.omega1)
    return replace(base, **{param.value: value})


@dataclass(frozen=True)
class SweepSpec:
    param_x: SweepParam
    x_values: np.ndarray
    param_y: SweepParam
    y_values: np.ndarray
    base: SystemParams
    solver: SolverConfig = SolverConfig()

    def __post_init__(self):
        for name in ("param_x", "param_y"):
            value = getattr(self, name)
            if not isinstance(value, SweepParam):
                object.__setattr__(self, name, SweepParam(value))
        if self.param_x is self.param_y:
            raise ParameterError("param_x and param_y must differ")
        for name in ("x_values", "y_values"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size < 2:
                raise ParameterError(f"{name} needs at least two points")
            if not np.all(np.isfinite(arr)):
                raise ParameterError(f"{name} must be finite")
            if np.any(np.diff(arr) <= 0):
                raise ParameterError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, arr)
        if self.base.omega1 == 0 and SweepParam.RATIO in (self.param_x, self.param_y):
            raise ParameterError("ratio sweeps need omega1 > 0")
        if self.base.omega1 > 0:
            # every cell must be a valid parameter set
            for px, py in ((self.x_values[0], self.y_values[0]), (self.x_values[-1], self.y_values[-1])):
                self.cell_params(px, py)

    @property
    def shape(self):
        return (self.x_values.size, self.y_values.size)

    def cell_params(self, x, y):
        return apply_param(apply_param(self.base, self.param_x, x), self.param_y, y)


@dataclass
class SweepResult:
    """Per-cell steady-state observables indexed ``[ix, iy]``.

    ``g2`` holds NaN where g2(0) is undefined or the cell failed; ``failed``
    marks cells whose solve raised, and those also carry NaN ``mean_n``.
    """

    param_x: SweepParam
    x_values: np.ndarray
    param_y: SweepParam
    y_values: np.ndarray
    mean_n: np.ndarray
    g2: np.ndarray
    n_max_used: np.ndarray
    converged: np.ndarray
    failed: np.ndarray

    @property
    def shape(self):
        return self.mean_n.shape

    def g2_value(self, ix, iy):
        v = self.g2[ix, iy]
        return UNDEFINED if math.isnan(v) else float(v)

    def rows(self):
        """Yield ``(ix, iy, x, y)`` in x-major order."""
        for ix, x in enumerate(self.x_values):
            for iy, y in enumerate(self.y_values):
                yield ix, iy, float(x), float(y)


def _solve_cell(params: SystemParams, solver: SolverConfig):
    try:
        res = auto_truncate(derive_dressed(params), params.kappa, solver)
    except (SolverError, ParameterError):
        return (math.nan, math.nan, -1, False, True)
    g = g2(res.state)
    return (mean_photon(res.state), math.nan if g is UNDEFINED else g,
            res.n_max, res.converged, False)


def _solve_row(spec: SweepSpec, ix):
    x = spec.x_values[ix]
    return [_solve_cell(spec.cell_params(x, y), spec.solver) for y in spec.y_values]


def run_sweep(spec: SweepSpec, workers=1) -> SweepResult:
    """One adaptive steady solve per grid cell.

    Rows of constant ``x`` are distributed over ``workers`` processes; results
    land in pre-shaped arrays so the output does not depend on scheduling.
    Cells whose solve fails are flagged rather than aborting the sweep.
    """
    nx, ny = spec.shape
    if workers is None or workers <= 1:
        rows = [_solve_row(spec, ix) for ix in range(nx)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_solve_row, [spec] * nx, range(nx)))
    mean_n = np.empty((nx, ny))
    g2v = np.empty((nx, ny))
    n_max = np.empty((nx, ny), dtype=int)
    converged = np.empty((nx, ny), dtype=bool)
    failed = np.empty((nx, ny), dtype=bool)
    for ix, row in enumerate(rows):
        for iy, (m, g, nm, conv, fail) in enumerate(row):
            mean_n[ix, iy], g2v[ix, iy], n_max[ix, iy] = m, g, nm
            converged[ix, iy], failed[ix, iy] = conv, fail
    return SweepResult(spec.param_x, spec.x_values, spec.param_y, spec.y_values,
                       mean_n, g2v, n_max, converged, failed)


def locate_minimum(result: SweepResult):
    """``(ix, iy, mean_n)`` of the smallest mean photon number over converged cells.

    Ties go to the smallest ``ix``, then the smallest ``iy``.
    """
    ok = result.converged & ~result.failed
    if not ok.any():
        raise SolverError("no converged cells in sweep result")
    masked = np.where(ok, result.mean_n, np.inf)
    ix, iy = np.unravel_index(int(np.argmin(masked)), masked.shape)
    return int(ix), int(iy), float(result.mean_n[ix, iy])
