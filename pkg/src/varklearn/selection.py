"""Threshold-based nomination of favoured styles from predicted probabilities.

Raw regression outputs are clamped to [0, 1]; every style whose clamped
probability is within ``threshold`` of the top one (inclusive) is nominated,
ordered by descending probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import STYLES, Style, StyleProbabilities


class SelectionError(ValueError):
    pass


class InvalidThreshold(SelectionError):
    pass


@dataclass(frozen=True)
class Nomination:
    """Ordered favoured-style set for one prediction.

    ``styles`` is sorted by descending clamped probability (canonical order
    on ties) and always starts with the top style.  ``normalized_probs``
    is the clamped vector rescaled onto the unit simplex for reporting; the
    inclusion test itself runs on the clamped, unrescaled values.
    ``degenerate`` flags predictions that clamp to all zeros, in which case
    all four styles are returned in canonical order.
    """

    styles: tuple[Style, ...]
    threshold: float
    normalized_probs: StyleProbabilities
    degenerate: bool = False


def nominate(raw_predictions, threshold: float) -> Nomination:
    """Select the favoured styles from four raw probability predictions."""
    if not isinstance(threshold, (int, float)) or math.isnan(threshold):
        raise InvalidThreshold(f"threshold must be a number, got {threshold!r}")
    if not 0.0 <= threshold <= 1.0:
        raise InvalidThreshold(f"threshold must be in [0, 1], got {threshold}")
    raw = list(raw_predictions)
    if len(raw) != 4 or not all(math.isfinite(x) for x in raw):
        raise SelectionError(f"need four finite predictions, got {raw!r}")

    clamped = [min(1.0, max(0.0, float(x))) for x in raw]
    total = sum(clamped)
    if total == 0.0:
        return Nomination(
            styles=tuple(STYLES),
            threshold=float(threshold),
            normalized_probs=StyleProbabilities((0.25, 0.25, 0.25, 0.25)),
            degenerate=True,
        )

    # stable sort on negated probability keeps canonical order within ties
    ordered = sorted(STYLES, key=lambda s: -clamped[s.index])
    top = clamped[ordered[0].index]
    chosen = tuple(s for s in ordered if top - clamped[s.index] <= threshold)
    return Nomination(
        styles=chosen,
        threshold=float(threshold),
        normalized_probs=StyleProbabilities(tuple(c / total for c in clamped)),
    )
