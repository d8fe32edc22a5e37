"""Model parameters, quasi-momentum pair sets and normal-mode frequencies.

Frequencies are measured in the frame rotating with the atomic transition,
so the cavity frequency enters only through the detuning.  Sites and modes
are labelled ``0 .. N-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import (
    IndexOutOfRange,
    NegativeRabi,
    NonFiniteValue,
    NonPositiveN,
    NonPositiveTunneling,
    NTooSmall,
    ParameterError,
)

__all__ = [
    "ModelParams",
    "PairSet",
    "validate_params",
    "normal_mode_frequency",
    "mode_frequencies",
    "sector_pairs",
    "check_sector",
    "coefficient_layout",
    "COMPONENTS",
]


@dataclass(frozen=True)
class ModelParams:
    """One translation-invariant JCH chain.

    Attributes
    ----------
    n_cavities : int
        Number of cavities N (periodic boundary conditions), at least 3.
    detuning : float
        Cavity minus atomic frequency.
    tunneling : float
        Photon hopping rate J.  Must be positive unless
        ``allow_zero_tunneling`` is set, in which case J = 0 is accepted.
    rabi : float
        Vacuum Rabi frequency g (non-negative).
    """

    n_cavities: int
    detuning: float = 0.0
    tunneling: float = 1.0
    rabi: float = 0.0
    allow_zero_tunneling: bool = False

    def __post_init__(self):
        n = self.n_cavities
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            if isinstance(n, float) and math.isfinite(n) and n == int(n):
                object.__setattr__(self, "n_cavities", int(n))
                n = int(n)
            elif isinstance(n, float) and not math.isfinite(n):
                raise NonFiniteValue(f"n_cavities must be finite, got {n!r}")
            else:
                raise ParameterError(f"n_cavities must be an integer, got {n!r}")
        n = int(n)
        object.__setattr__(self, "n_cavities", n)
        if n <= 0:
            raise NonPositiveN(f"n_cavities must be positive, got {n}")
        if n < 3:
            raise NTooSmall(f"n_cavities must be at least 3, got {n}")

        for name in ("detuning", "tunneling", "rabi"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"{name} must be a real number, got {value!r}") from exc
            if not math.isfinite(value):
                raise NonFiniteValue(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        if self.rabi < 0:
            raise NegativeRabi(f"rabi must be non-negative, got {self.rabi}")
        if self.tunneling < 0 or (self.tunneling == 0 and not self.allow_zero_tunneling):
            raise NonPositiveTunneling(
                f"tunneling must be positive (got {self.tunneling}); "
                "pass allow_zero_tunneling=True for the decoupled-cavity limit"
            )

    @property
    def g_over_j(self) -> float:
        return self.rabi / self.tunneling if self.tunneling else math.inf

    def replace(self, **changes) -> "ModelParams":
        fields = dict(
            n_cavities=self.n_cavities,
            detuning=self.detuning,
            tunneling=self.tunneling,
            rabi=self.rabi,
            allow_zero_tunneling=self.allow_zero_tunneling,
        )
        fields.update(changes)
        return ModelParams(**fields)


_ALIASES = {
    "n": "n_cavities",
    "N": "n_cavities",
    "n_cavities": "n_cavities",
    "delta": "detuning",
    "detuning": "detuning",
    "j": "tunneling",
    "J": "tunneling",
    "tunneling": "tunneling",
    "g": "rabi",
    "rabi": "rabi",
    "allow_zero_j": "allow_zero_tunneling",
    "allow_zero_tunneling": "allow_zero_tunneling",
}


def validate_params(raw: Mapping[str, Any] | ModelParams) -> ModelParams:
    """Build a validated :class:`ModelParams` from a loose record.

    Accepts either field names or the short aliases ``N``, ``delta``, ``J``,
    ``g``.  Nothing is clamped: every invalid value raises.
    """
    if isinstance(raw, ModelParams):
        return ModelParams(**{f: getattr(raw, f) for f in raw.__dataclass_fields__})
    kwargs = {}
    for key, value in raw.items():
        try:
            field = _ALIASES[key]
        except KeyError:
            raise ParameterError(f"unknown parameter {key!r}") from None
        if field in kwargs:
            raise ParameterError(f"parameter {field!r} given twice")
        kwargs[field] = value
    if "n_cavities" not in kwargs:
        raise ParameterError("missing parameter 'n_cavities'")
    return ModelParams(**kwargs)


def _check_mode(n: int, k) -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= k < n:
        raise IndexOutOfRange(f"mode index {k!r} outside [0, {n - 1}]")
    return int(k)


def check_sector(n: int, p) -> int:
    """Return ``p`` as an int after checking ``0 <= p < n``."""
    if isinstance(p, bool) or int(p) != p or not 0 <= p < n:
        raise IndexOutOfRange(f"sector index {p!r} outside [0, {n - 1}]")
    return int(p)


def normal_mode_frequency(params: ModelParams, k: int) -> float:
    """Photon normal-mode frequency ``Delta + 2 J cos(2 pi k / N)``."""
    k = _check_mode(params.n_cavities, k)
    return params.detuning + 2.0 * params.tunneling * math.cos(2.0 * math.pi * k / params.n_cavities)


def mode_frequencies(params: ModelParams) -> np.ndarray:
    """All N normal-mode frequencies, indexed by k."""
    k = np.arange(params.n_cavities)
    return params.detuning + 2.0 * params.tunneling * np.cos(2.0 * np.pi * k / params.n_cavities)


@dataclass(frozen=True)
class PairSet:
    """Mode pairs ``(k, j)`` with ``k <= j`` and ``k + j = P (mod N)``."""

    n_cavities: int
    sector: int
    pairs: tuple

    @property
    def diagonal_count(self) -> int:
        return sum(1 for k, j in self.pairs if k == j)

    @property
    def off_diagonal_count(self) -> int:
        return len(self.pairs) - self.diagonal_count

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def sector_pairs(n: int, p: int) -> PairSet:
    """Enumerate the pair set of sector ``p`` in ascending ``(k, j)`` order."""
    if int(n) != n or n < 3:
        raise NTooSmall(f"n_cavities must be an integer >= 3, got {n!r}")
    n = int(n)
    p = check_sector(n, p)
    pairs = []
    for k in range(n):
        j = (p - k) % n
        if j >= k:
            pairs.append((k, j))
    return PairSet(n, p, tuple(pairs))


COMPONENTS = ("alpha", "beta", "beta_prime", "gamma")


def coefficient_layout(pair_set: PairSet) -> tuple:
    """Row/column labels ``(k, j, component)`` of the sector coefficient vector.

    Each pair contributes ``alpha, beta, beta_prime, gamma`` in that order;
    diagonal pairs (k == j) omit ``beta_prime``.
    """
    layout = []
    for k, j in pair_set.pairs:
        for comp in COMPONENTS:
            if comp == "beta_prime" and k == j:
                continue
            layout.append((k, j, comp))
    return tuple(layout)
