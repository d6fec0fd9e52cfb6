"""Limits of the distance between two Jenkins-Strebel rays.

For similar rays with matched moduli ``m_j`` (left) and ``m'_j`` (right) the
limiting Teichmueller distance is

    max( 1/2 log max_j max(m'_j/m_j, m_j/m'_j),  d_end )

where ``d_end`` is the distance between the end points of the rays in the
augmented Teichmueller space (an input here). Rays that are not similar drift
apart. Ratios are handled as differences of logarithms so that the optimal
shift reproduces the minimum to rounding precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError, MissingInputError
from .surface import NotSimilar, SimilarPair


@dataclass(frozen=True)
class AsymptoticResult:
    kind: Literal["finite", "divergent"]
    value: float | None = None
    modulus_term: float | None = None
    end_term: float | None = None
    argmax: int | None = None

    @property
    def divergent(self) -> bool:
        return self.kind == "divergent"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "contributions": {"modulus_term": self.modulus_term, "end_term": self.end_term, "argmax": self.argmax},
        }


DIVERGENT = AsymptoticResult("divergent")


def _log_ratios(pair: SimilarPair, alpha: float = 0.0) -> list[float]:
    """``log(e^{2 alpha} m'_j / m_j)`` for every matched curve."""
    out = []
    for m, mp in zip(pair.left_moduli, pair.right_moduli):
        if not (m > 0 and mp > 0):
            raise DomainError(f"moduli must be positive, got {m!r}, {mp!r}")
        out.append(math.log(mp) - math.log(m) + 2.0 * alpha)
    return out


def _first_argmax(values) -> int:
    best = 0
    for j, v in enumerate(values):
        if v > values[best]:
            best = j
    return best


def _modulus_term(pair: SimilarPair, alpha: float = 0.0) -> tuple[float, int]:
    r = [abs(x) for x in _log_ratios(pair, alpha)]
    j = _first_argmax(r)
    return 0.5 * r[j], j


def modulus_ratio_term(pair: SimilarPair) -> float:
    return _modulus_term(pair)[0]


def _end_term(pair: SimilarPair) -> float:
    if pair.end_distance is None:
        raise MissingInputError("similar pair needs the end-point distance d_end")
    return pair.end_distance


def _result(pair: SimilarPair, alpha: float) -> AsymptoticResult:
    end = _end_term(pair)
    mod, j = _modulus_term(pair, alpha)
    return AsymptoticResult("finite", max(mod, end), mod, end, j)


def asymptotic_distance(pair: SimilarPair | NotSimilar) -> AsymptoticResult:
    if isinstance(pair, NotSimilar):
        return DIVERGENT
    return _result(pair, 0.0)


def _max_logs(pair: SimilarPair) -> tuple[float, float]:
    """``(log max_j m'_j/m_j, log max_j m_j/m'_j)``."""
    r = _log_ratios(pair)
    return max(r), max(-x for x in r)


def detour_metric(pair: SimilarPair) -> float:
    up, down = _max_logs(pair)
    return 0.5 * up + 0.5 * down


def optimal_shift(pair: SimilarPair) -> float:
    """Shift ``alpha`` of the right ray's base point that balances the two maxima."""
    up, down = _max_logs(pair)
    return 0.25 * (down - up)


def shifted_asymptotic_distance(pair: SimilarPair | NotSimilar, alpha: float) -> AsymptoticResult:
    """Limit distance between ``r(t)`` and ``r'(t + alpha)``."""
    if isinstance(pair, NotSimilar):
        return DIVERGENT
    return _result(pair, alpha)


def minimal_shifted_distance(pair: SimilarPair) -> float:
    return max(0.5 * detour_metric(pair), _end_term(pair))


def lower_bound(pair: SimilarPair) -> float:
    """Maximum of the two known lower bounds for the liminf of the distance."""
    modulus_bound = modulus_ratio_term(pair)
    end_bound = _end_term(pair)
    return max(modulus_bound, end_bound)
