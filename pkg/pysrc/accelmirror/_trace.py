"""Solver state and per-iteration trace records."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .linops import DualVec, PrimalVec


@dataclass(frozen=True)
class SolverState:
    """
    State of a discrete optimizer after ``k`` steps.

    Attributes:
        k: Iteration count.
        x: Current primal iterate ``x_k``.
        zeta: Dual iterate ``zeta_k``, or None for purely primal methods.
        y: Last extrapolation (gradient evaluation) point.
        gamma: Coefficient ``gamma_k`` that the next step will use.
        z: Primal mirror point ``z_k = chi(zeta_k)`` for the primal form of AMD.
        x_prev: ``x_{k-1}`` for the three-term recursion.
    """

    k: int
    x: PrimalVec
    zeta: DualVec | None
    y: PrimalVec
    gamma: float = 1.0
    z: PrimalVec | None = None
    x_prev: PrimalVec | None = None

    def evolve(self, **changes: object) -> SolverState:
        """Copy with some fields replaced."""
        return replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True)
class TraceRecord:
    """
    One row of a run trace.

    ``f_gap`` is ``f(x_k) - f(x*)``; it may dip slightly below zero when ``f*``
    comes from a reference run. ``lyapunov_dual`` is None when no dual optimum
    ``zeta*`` exists (minimizer on the boundary). Wall-clock time is never
    recorded, so traces of identical runs compare equal.
    """

    k: int
    f_gap: float
    lyapunov_primal: float | None = None
    lyapunov_dual: float | None = None

    @property
    def finite(self) -> bool:
        values = [self.f_gap, self.lyapunov_primal, self.lyapunov_dual]
        return all(v is None or math.isfinite(v) for v in values)
