"""Tsallis-q and von Neumann entropies (natural logarithm)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import NULL_TOL, DensityMatrix, DomainError

LIMIT_WINDOW = 1e-6


@dataclass(frozen=True)
class EntropicIndex:
    """The entropic parameter q > 0.

    Within ``LIMIT_WINDOW`` of 1 every q-dependent quantity switches to its
    exact q -> 1 limit.
    """

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q <= 0:
            raise DomainError(f"entropic index must be a positive real, got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def is_limit_point(self) -> bool:
        return abs(self.q - 1.0) < LIMIT_WINDOW

    def __float__(self) -> float:
        return self.q


def as_index(q) -> EntropicIndex:
    return q if isinstance(q, EntropicIndex) else EntropicIndex(q)


def shannon(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def tsallis_from_spectrum(p: np.ndarray, q) -> float:
    """T_q of a probability vector; 0**q is taken as 0.

    Entries up to NULL_TOL count as zero: for q < 1 a roundoff eigenvalue of
    1e-17 would otherwise add about 1e-8 to the result.
    """
    q = as_index(q)
    p = np.asarray(p, dtype=float)
    p = p[p > NULL_TOL]
    if q.is_limit_point:
        return shannon(p)
    return max(0.0, float((1.0 - np.sum(p**q.q)) / (q.q - 1.0)))


def von_neumann(rho: DensityMatrix) -> float:
    return max(0.0, shannon(rho.spectrum()))


def tsallis_entropy(rho: DensityMatrix, q) -> float:
    """T_q(rho) = (1 - tr rho^q) / (q - 1), von Neumann at q = 1."""
    return tsallis_from_spectrum(rho.spectrum(), q)
