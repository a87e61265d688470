"""Physical parameters and dressed-basis constants.

All rates are dimensionless multiples of the lower-transition decay rate
``gamma1``; times are in units of ``1/gamma1``. The driven emitter is
diagonalised analytically (eigenvalues -Omega, 0, +Omega) and the cavity is
taken resonant with the most energetic dressed sideband, at ``+2 Omega``
from the laser frequency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "SystemParams",
    "DressedParams",
    "Severity",
    "SecularReport",
    "derive_dressed",
    "secular_check",
]


@dataclass(frozen=True)
class SystemParams:
    """Input parameters of the emitter-cavity model.

    Parameters
    ----------
    g1, g2 : float
        Cavity coupling to the lower (1-2) and upper (2-3) transitions.
    gamma2 : float
        Spontaneous decay rate 3 -> 2.
    kappa : float
        Cavity field damping rate.
    omega1, omega2 : float
        Rabi frequencies of the lasers driving the lower and upper transitions.
    gamma1 : float
        Spontaneous decay rate 2 -> 1; sets the unit scale.
    phi1, phi2 : float
        Laser phases in radians.
    """

    g1: float
    g2: float
    gamma2: float
    kappa: float
    omega1: float
    omega2: float
    gamma1: float = 1.0
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        for name in ("g1", "g2", "gamma1", "gamma2", "kappa",
                     "omega1", "omega2", "phi1", "phi2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        for name in ("g1", "g2", "gamma2", "omega1", "omega2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        for name in ("gamma1", "kappa"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.omega1 + self.omega2 <= 0:
            raise ParameterError("omega1 and omega2 cannot both vanish: "
                                 "the dressed mixing angle is undefined")

    @property
    def rabi_ratio(self):
        """Omega2 / Omega1 (``inf`` when only the upper laser is on)."""
        if self.omega1 == 0:
            return math.inf
        return self.omega2 / self.omega1


@dataclass(frozen=True)
class DressedParams:
    """Constants of the secular dressed-state master equation.

    ``g_eff`` is the complex effective coupling of the cavity to the
    ``|+> -> |->`` dressed transition; only its modulus ``g_abs`` enters the
    photon statistics. ``alpha``, ``beta`` and ``zeta`` are the damping
    constants of the reduced Fock-diagonal equations.
    """

    theta: float
    omega_total: float
    g_eff: complex
    g_abs: float
    psi: float
    gamma_a: float
    gamma_b: float
    gamma_c: float
    alpha: float
    beta: float
    zeta: float
    gamma1: float
    gamma2: float

    @property
    def cos2(self):
        return math.cos(self.theta) ** 2

    @property
    def sin2(self):
        return math.sin(self.theta) ** 2

    @property
    def pump(self):
        """Feeding rate of the outer dressed populations from ``|0>``."""
        return self.gamma2 * self.cos2


def derive_dressed(params: SystemParams) -> DressedParams:
    """Compute the dressed-basis constants for ``params``.

    The mixing angle uses ``atan2(omega2, omega1)`` so that a vanishing
    lower-transition drive gives ``theta = pi/2`` without dividing by zero.
    The effective coupling is evaluated as ``exp(-i phi1)`` times a factor
    that depends only on the phase difference, which makes ``g_abs`` exactly
    a function of ``phi2 - phi1``.
    """
    o1, o2 = params.omega1, params.omega2
    if o1 == 0 and o2 == 0:
        raise ParameterError("omega1 = omega2 = 0: mixing angle undefined")
    omega = math.hypot(o1, o2)
    theta = math.atan2(o2, o1)
    cos_t = o1 / omega
    sin_t = o2 / omega
    c2, s2 = cos_t * cos_t, sin_t * sin_t

    dphi = params.phi2 - params.phi1
    relative = params.g2 * sin_t * complex(math.cos(dphi), -math.sin(dphi)) - params.g1 * cos_t
    g_abs = 0.5 * abs(relative)
    g_eff = 0.5 * relative * complex(math.cos(params.phi1), -math.sin(params.phi1))
    psi = math.atan2(g_eff.imag, g_eff.real) if g_abs > 0 else 0.0

    gam1, gam2 = params.gamma1, params.gamma2
    return DressedParams(
        theta=theta,
        omega_total=omega,
        g_eff=g_eff,
        g_abs=g_abs,
        psi=psi,
        gamma_a=gam2 * c2 / 4,
        gamma_b=gam1 * s2 / 4,
        gamma_c=(gam2 * s2 + gam1 * c2) / 8,
        alpha=gam1 * s2 + 2 * gam2 * c2,
        beta=gam1 + gam2 * s2,
        zeta=(gam1 * (2 + c2) + 3 * gam2 * s2) / 4,
        gamma1=gam1,
        gamma2=gam2,
    )


class Severity(enum.Enum):
    OK = "OK"
    WARN = "WARN"
    VIOLATION = "VIOLATION"


@dataclass(frozen=True)
class SecularReport:
    coupling_ratio: float
    decay_ratio: float
    severity: Severity

    def __str__(self):
        return (f"{self.severity.value} (max(g)/Omega = {self.coupling_ratio:.4g}, "
                f"max(gamma)/Omega = {self.decay_ratio:.4g})")


def secular_check(params: SystemParams, dressed: DressedParams, *,
                  warn=0.1, violation=0.3) -> SecularReport:
    """Quantify how well the secular approximation holds.

    Both ``max(g1, g2)/Omega`` and ``max(gamma1, gamma2)/Omega`` are compared
    against the ``warn`` and ``violation`` thresholds; the worse ratio decides.
    """
    if not 0 < warn <= violation:
        raise ParameterError("secular thresholds must satisfy 0 < warn <= violation")
    omega = dressed.omega_total
    rc = max(params.g1, params.g2) / omega
    rd = max(params.gamma1, params.gamma2) / omega
    worst = max(rc, rd)
    if worst >= violation:
        severity = Severity.VIOLATION
    elif worst >= warn:
        severity = Severity.WARN
    else:
        severity = Severity.OK
    return SecularReport(rc, rd, severity)
