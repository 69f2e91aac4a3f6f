"""Coefficient sequences gamma_k driving AMD's convex combinations."""

from __future__ import annotations

import math
import threading
from typing import Final, Literal, cast

import numpy as np

from ._common import ConfigError, DomainError, FloatArray

ScheduleKind = Literal["nesterov_recurrence", "linear", "constant"]

SCHEDULE_KINDS: Final[tuple[ScheduleKind, ...]] = ("nesterov_recurrence", "linear", "constant")
GAMMA_CONDITION_TOL: Final[float] = 1e-12


class GammaSchedule:
    """
    A sequence ``gamma_0, gamma_1, ...`` with ``gamma_k >= 1``.

    Kinds:
      - ``nesterov_recurrence``: ``gamma_0 = 1`` and
        ``gamma_k = (1 + sqrt(1 + 4 gamma_{k-1}^2)) / 2``, so that
        ``gamma_k^2 - gamma_{k-1}^2 - gamma_k = 0``.
      - ``linear(r)``: ``gamma_k = (k + r) / r``.
      - ``constant(1)``: ``gamma_k = 1`` for every k, which turns the
        three-term recursion into gradient descent.

    ``value(k)`` is random-access (recurrence values are memoized under a
    lock, so one schedule may serve several runs). ``gamma_next()`` advances
    an internal cursor and returns the new value, for step-by-step use.

    Example:
        ```python
        s = GammaSchedule.nesterov()
        s.gamma_next()  # 1.618...
        GammaSchedule.linear(2).value(3)  # 2.5
        ```
    """

    __slots__ = ("_cache", "_cursor", "_kind", "_lock", "_param")

    def __init__(self, kind: ScheduleKind, param: float | None = None):
        if kind not in SCHEDULE_KINDS:
            raise ConfigError(f"Unknown gamma schedule kind {kind!r}")
        if kind == "linear":
            if param is None or not math.isfinite(param) or param <= 0.0:
                raise ConfigError(f"linear schedule needs r > 0, got {param!r}")
        elif kind == "constant":
            # gamma_0 = 1 for every schedule, so the only constant one is gamma = 1.
            if param is None or param != 1.0:
                raise ConfigError(f"constant schedule needs c = 1, got {param!r}")
        else:
            param = None
        self._kind: ScheduleKind = kind
        self._param = None if param is None else float(param)
        self._cache: list[float] = [1.0]
        self._lock = threading.Lock()
        self._cursor = 0

    # ---- Constructors ----

    @classmethod
    def nesterov(cls) -> GammaSchedule:
        return cls("nesterov_recurrence")

    @classmethod
    def linear(cls, r: float) -> GammaSchedule:
        return cls("linear", r)

    @classmethod
    def constant(cls, c: float = 1.0) -> GammaSchedule:
        return cls("constant", c)

    @classmethod
    def parse(cls, text: str) -> GammaSchedule:
        """
        Parse ``recurrence``, ``linear:R``, ``constant`` or ``constant:1``.

        Raises:
            ConfigError: On any other spelling.
        """
        name, _, arg = text.strip().partition(":")
        name = name.lower()
        try:
            if name in ("recurrence", "nesterov", "nesterov_recurrence") and not arg:
                return cls.nesterov()
            if name == "linear" and arg:
                return cls.linear(float(arg))
            if name == "constant":
                return cls.constant(float(arg) if arg else 1.0)
        except ValueError:
            pass
        raise ConfigError(
            f"Invalid gamma schedule {text!r}; expected recurrence, linear:R or constant"
        )

    # ---- Properties ----

    @property
    def kind(self) -> ScheduleKind:
        return self._kind

    @property
    def param(self) -> float | None:
        return self._param

    @property
    def k(self) -> int:
        """Index of the value returned by the last ``gamma_next`` call."""
        return self._cursor

    @property
    def current(self) -> float:
        return self.value(self._cursor)

    def describe(self) -> str:
        """Inverse of ``parse``."""
        if self._kind == "nesterov_recurrence":
            return "recurrence"
        return f"{self._kind}:{self._param!r}"

    # ---- Values ----

    def value(self, k: int) -> float:
        """
        ``gamma_k``.

        Raises:
            ValueError: If ``k`` is negative.
        """
        if k < 0:
            raise ValueError(f"gamma index must be nonnegative, got {k}")
        if self._kind == "linear":
            r = cast(float, self._param)
            return (k + r) / r
        if self._kind == "constant":
            return cast(float, self._param)
        cache = self._cache
        if k < len(cache):
            return cache[k]
        with self._lock:
            while len(cache) <= k:
                g = cache[-1]
                cache.append((1.0 + math.sqrt(1.0 + 4.0 * g * g)) / 2.0)
        return cache[k]

    def values(self, n: int) -> FloatArray:
        """``[gamma_0, ..., gamma_{n-1}]``."""
        return np.array([self.value(k) for k in range(n)], dtype=np.float64)

    def gamma_next(self) -> float:
        """Advance the cursor by one and return the new ``gamma_k``."""
        self._cursor += 1
        return self.value(self._cursor)

    def reset(self) -> None:
        self._cursor = 0

    def fresh(self) -> GammaSchedule:
        """Same schedule, cursor at zero; shares no mutable state with ``self``."""
        return GammaSchedule(self._kind, self._param)

    # ---- Conditions ----

    def condition_residual(self, k: int) -> float:
        """``gamma_k^2 - gamma_{k-1}^2 - gamma_k`` for ``k >= 1``."""
        g, g_prev = self.value(k), self.value(k - 1)
        return g * g - g_prev * g_prev - g

    def satisfies_amd_condition(self, n: int) -> bool:
        """
        True when ``gamma_k^2 - gamma_{k-1}^2 - gamma_k <= 1e-12`` for ``1 <= k <= n``.

        The tolerance is scaled by ``max(1, gamma_k^2)`` since the residual of
        the recurrence is a difference of two numbers of that size.
        """
        for k in range(1, n + 1):
            g = self.value(k)
            if self.condition_residual(k) > GAMMA_CONDITION_TOL * max(1.0, g * g):
                return False
        return True

    def validate_for_amd(self, n: int | None = None) -> None:
        """
        Reject schedules that break the AMD step-size condition.

        ``linear(r)`` needs ``r >= 2``. With ``n`` given, the condition is
        also checked numerically for the first ``n`` steps.

        Raises:
            DomainError: If the condition fails.
        """
        if self._kind == "linear" and self._param is not None and self._param < 2.0:
            raise DomainError(
                f"linear gamma schedule with r={self._param} < 2 violates the AMD "
                "condition gamma_k^2 - gamma_{k-1}^2 <= gamma_k"
            )
        if n is not None and not self.satisfies_amd_condition(n):
            raise DomainError(f"gamma schedule {self.describe()} violates the AMD condition")

    def asymptotic_offset(self, k: int) -> float:
        """
        ``gamma_k - k/2 - log(k)/4`` for the recurrence, which stays bounded.

        Raises:
            DomainError: For other kinds or ``k < 1``.
        """
        if self._kind != "nesterov_recurrence":
            raise DomainError("asymptotic_offset is defined for the recurrence only")
        if k < 1:
            raise DomainError("asymptotic_offset needs k >= 1")
        return self.value(k) - k / 2.0 - 0.25 * math.log(k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GammaSchedule):
            return NotImplemented
        return self._kind == other._kind and self._param == other._param

    def __hash__(self) -> int:
        return hash((self._kind, self._param))

    def __repr__(self) -> str:
        return f"GammaSchedule({self.describe()!r})"


def gamma_next(schedule: GammaSchedule) -> float:
    """Advance ``schedule`` and return the next coefficient."""
    return schedule.gamma_next()
