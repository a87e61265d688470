"""Cavity photon statistics from either solver's state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dressed import EPS_NUM, DressedState

__all__ = [
    "UNDEFINED",
    "EPS_G2",
    "Observables",
    "photon_distribution",
    "mean_photon",
    "g2",
    "emitter_summary",
    "observables",
]

EPS_G2 = 1e-6


class _Undefined:
    """Marker for g2(0) when the mean photon number is too small to divide by."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __str__(self):
        return "undefined"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()


def photon_distribution(state):
    """Photon-number probabilities ``p[n]``.

    Accepts a :class:`DressedState`, a ``FullState`` (anything with a ``rho``
    and ``n_max``) or a plain sequence of probabilities. Negative round-off
    down to ``-1e-10`` is clamped to zero; larger negative entries are kept
    so that they remain visible.
    """
    if isinstance(state, DressedState):
        p = state.p0.copy()
    elif hasattr(state, "rho"):
        m = state.n_max + 1
        diag = np.real(np.diagonal(state.rho))
        p = diag.reshape(-1, m).sum(axis=0)
    else:
        p = np.array(state, dtype=float)
    small = (p < 0) & (p >= -EPS_NUM)
    p[small] = 0.0
    return p


def mean_photon(state):
    p = photon_distribution(state)
    return float(np.dot(np.arange(p.size), p))


def g2(state, eps=EPS_G2):
    """Equal-time normalised second-order correlation of the cavity field.

    Returns :data:`UNDEFINED` when ``<n> < eps``.
    """
    p = photon_distribution(state)
    n = np.arange(p.size)
    mean = float(np.dot(n, p))
    if mean < eps:
        return UNDEFINED
    return float(np.dot(n * (n - 1), p)) / mean**2


def emitter_summary(state: DressedState):
    """Total ``(rho_++ + rho_--, rho_++ - rho_--)`` summed over photon number."""
    return float(state.p1.sum()), float(state.p2.sum())


@dataclass(frozen=True)
class Observables:
    mean_n: float
    g2_zero: object
    trace: float
    photon_dist: np.ndarray

    @property
    def g2_defined(self):
        return self.g2_zero is not UNDEFINED


def observables(state, eps=EPS_G2) -> Observables:
    p = photon_distribution(state)
    return Observables(mean_n=mean_photon(p), g2_zero=g2(p, eps),
                       trace=float(p.sum()), photon_dist=p)
