"""Log-log rate estimation on run traces."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from .._common import DomainError
from .._trace import TraceRecord

MIN_RECORDS: Final[int] = 10


@dataclass(frozen=True)
class RateFit:
    """
    Least-squares line through ``(log k, log f_gap)`` on ``[k_lo, k_hi]``.

    ``slope`` near -1 means a ``1/k`` decay, near -2 a ``1/k^2`` decay.
    ``residual`` is the root-mean-square deviation from the line.
    """

    k_lo: int
    k_hi: int
    slope: float
    intercept: float
    residual: float
    n_points: int


def default_window(records: Sequence[TraceRecord]) -> tuple[int, int]:
    """The last decade of iterations, ``[max(1, K // 10), K]``."""
    if not records:
        raise DomainError("cannot pick a window for an empty trace")
    k_hi = max(r.k for r in records)
    return max(1, k_hi // 10), k_hi


def fit_rate(
    records: Sequence[TraceRecord], window: tuple[int, int] | None = None
) -> RateFit:
    """
    Fit the decay rate of ``f_gap`` over a window of iterations.

    Only records with ``k >= 1`` and a positive, finite ``f_gap`` take part.

    Raises:
        DomainError: If every gap in the window is nonpositive, or fewer than
            ten records are usable.
    """
    k_lo, k_hi = window if window is not None else default_window(records)
    if k_hi < k_lo:
        raise DomainError(f"empty window [{k_lo}, {k_hi}]")
    in_window = [r for r in records if k_lo <= r.k <= k_hi and r.k >= 1]
    usable = [r for r in in_window if r.f_gap > 0.0 and math.isfinite(r.f_gap)]
    if in_window and not usable:
        raise DomainError(f"all f gaps in [{k_lo}, {k_hi}] are nonpositive")
    if len(usable) < MIN_RECORDS:
        raise DomainError(
            f"need at least {MIN_RECORDS} records with a positive gap in [{k_lo}, {k_hi}], "
            f"got {len(usable)}"
        )
    log_k = np.log([float(r.k) for r in usable])
    log_gap = np.log([r.f_gap for r in usable])
    slope, intercept = np.polyfit(log_k, log_gap, 1)
    resid = log_gap - (slope * log_k + intercept)
    return RateFit(
        k_lo=k_lo,
        k_hi=k_hi,
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid * resid))),
        n_points=len(usable),
    )
