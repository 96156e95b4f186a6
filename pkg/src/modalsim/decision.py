"""Weighted-score decision engine.

Each respondent scores a mode as the priority-weighted average of its
evaluations over the unmasked criteria. The declared usual mode is then
classified against the argmax:

  Constrained  every top-scoring mode (over all four) is unavailable
  Rational     the usual mode is among the top-scoring available modes
  Irrational   otherwise

Constrained takes precedence. Ties are kept as sets (tolerance 1e-9); a
respondent is never penalized for a tie.

Scalar operations work on a single Respondent. The *_tensor functions are
the vectorized equivalents over Population.arrays and produce bit-identical
classifications; bulk reports use them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import BadConfig, DegeneratePriorities, EmptyGroup
from .model import (
    CRITERIA,
    CRITERION_INDEX,
    GENDERS,
    MODE_INDEX,
    MODES,
    Criterion,
    EvaluationMatrix,
    Mode,
    Population,
    PopulationArrays,
    Respondent,
)

TIE_TOLERANCE = 1e-9

CriterionMask = frozenset  # of Criterion

NO_MASK: frozenset[Criterion] = frozenset()


# ---------------------------------------------------------------------------
# Evaluation sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfEvals:
    """Each respondent is judged by their own evaluation matrix."""


@dataclass(frozen=True)
class Crowd:
    """Everyone is judged by a single shared matrix (population medians)."""

    medians: EvaluationMatrix


@dataclass(frozen=True)
class Overlay:
    """A base source with specific (mode, criterion) cells replaced, for
    every respondent alike."""

    base: "EvalSource"
    overrides: frozenset[tuple[Mode, Criterion, float]]

    def __post_init__(self):
        seen = set()
        for mode, criterion, value in self.overrides:
            if (mode, criterion) in seen:
                raise BadConfig(
                    f"duplicate override for ({mode.value}, {criterion.value})"
                )
            seen.add((mode, criterion))
            if not (
                isinstance(value, (int, float))
                and not isinstance(value, bool)
                and np.isfinite(value)
                and 0 <= value <= 10
            ):
                raise BadConfig(
                    f"override value {value!r} for ({mode.value}, {criterion.value}) "
                    "is not a number in [0, 10]"
                )


EvalSource = Union[SelfEvals, Crowd, Overlay]


def eval_source_label(src: EvalSource) -> str:
    if isinstance(src, SelfEvals):
        return "self"
    if isinstance(src, Crowd):
        return "crowd"
    if isinstance(src, Overlay):
        return "overlay"
    raise BadConfig(f"unknown evaluation source {src!r}")


def effective_matrix(r: Respondent, src: EvalSource) -> EvaluationMatrix:
    """The evaluation matrix the decision actually runs on."""
    if isinstance(src, SelfEvals):
        return r.evaluations
    if isinstance(src, Crowd):
        return src.medians
    if isinstance(src, Overlay):
        base = effective_matrix(r, src.base)
        for mode, criterion, value in src.overrides:
            base = base.with_cell(mode, criterion, value)
        return base
    raise BadConfig(f"unknown evaluation source {src!r}")


def effective_tensor(arrays: PopulationArrays, src: EvalSource) -> np.ndarray:
    """(n, 4, 6) array of effective evaluations. May alias internal storage;
    treat as read-only."""
    if isinstance(src, SelfEvals):
        return arrays.evaluations
    if isinstance(src, Crowd):
        cell = src.medians.as_array()
        return np.broadcast_to(cell, (arrays.size, 4, 6))
    if isinstance(src, Overlay):
        out = np.array(effective_tensor(arrays, src.base), dtype=float)
        for mode, criterion, value in src.overrides:
            out[:, MODE_INDEX[mode], CRITERION_INDEX[criterion]] = value
        return out
    raise BadConfig(f"unknown evaluation source {src!r}")


# ---------------------------------------------------------------------------
# Scalar engine
# ---------------------------------------------------------------------------


class Classification(enum.Enum):
    RATIONAL = "Rational"
    IRRATIONAL = "Irrational"
    CONSTRAINED = "Constrained"


@dataclass(frozen=True)
class DecisionOutcome:
    scores: dict[Mode, float]
    best_overall: frozenset[Mode]
    best_available: frozenset[Mode]
    classification: Classification


def _unmasked_weight(r: Respondent, mask: frozenset[Criterion]) -> float:
    total = sum(r.priorities[c] for c in CRITERIA if c not in mask)
    if total <= 0:
        raise DegeneratePriorities(
            f"respondent {r.id}: every unmasked criterion has zero priority"
        )
    return total


def score(
    r: Respondent,
    m: Mode,
    src: EvalSource = SelfEvals(),
    mask: frozenset[Criterion] = NO_MASK,
) -> float:
    """Priority-weighted average evaluation of mode m, in [0, 10]."""
    total = _unmasked_weight(r, mask)
    evals = effective_matrix(r, src)
    acc = sum(evals[m, c] * r.priorities[c] for c in CRITERIA if c not in mask)
    return acc / total


def argmax_modes(
    r: Respondent,
    src: EvalSource = SelfEvals(),
    mask: frozenset[Criterion] = NO_MASK,
    restrict_to_available: bool = True,
) -> frozenset[Mode]:
    """All maximizing modes (ties preserved within TIE_TOLERANCE)."""
    candidates = r.available if restrict_to_available else MODES
    scores = {m: score(r, m, src, mask) for m in candidates}
    top = max(scores.values())
    return frozenset(m for m in candidates if scores[m] >= top - TIE_TOLERANCE)


def decide(
    r: Respondent,
    src: EvalSource = SelfEvals(),
    mask: frozenset[Criterion] = NO_MASK,
) -> DecisionOutcome:
    scores = {m: score(r, m, src, mask) for m in MODES}
    top_all = max(scores.values())
    best_overall = frozenset(m for m in MODES if scores[m] >= top_all - TIE_TOLERANCE)
    top_avail = max(scores[m] for m in r.available)
    best_available = frozenset(
        m for m in r.available if scores[m] >= top_avail - TIE_TOLERANCE
    )
    if not (best_overall - r.unavailable):
        classification = Classification.CONSTRAINED
    elif r.usual_mode in best_available:
        classification = Classification.RATIONAL
    else:
        classification = Classification.IRRATIONAL
    return DecisionOutcome(
        scores=scores,
        best_overall=best_overall,
        best_available=best_available,
        classification=classification,
    )


def classify(
    r: Respondent,
    src: EvalSource = SelfEvals(),
    mask: frozenset[Criterion] = NO_MASK,
) -> Classification:
    return decide(r, src, mask).classification


def make_scorer(
    src: EvalSource = SelfEvals(), mask: frozenset[Criterion] = NO_MASK
) -> Callable[[Respondent, Mode], float]:
    """Bind a source and mask into an (r, m) -> score callable."""

    def scorer(r: Respondent, m: Mode) -> float:
        return score(r, m, src, mask)

    return scorer


# ---------------------------------------------------------------------------
# Vectorized engine
# ---------------------------------------------------------------------------

# Classification codes used throughout the bulk paths.
RATIONAL_CODE, IRRATIONAL_CODE, CONSTRAINED_CODE = 0, 1, 2

_CODE_TO_CLASSIFICATION = {
    RATIONAL_CODE: Classification.RATIONAL,
    IRRATIONAL_CODE: Classification.IRRATIONAL,
    CONSTRAINED_CODE: Classification.CONSTRAINED,
}


def scores_tensor(
    arrays: PopulationArrays,
    tensor: np.ndarray,
    mask_matrix: Optional[np.ndarray] = None,
) -> np.ndarray:
    """(n, 4) score matrix. mask_matrix is (n, 6) bool, True = ignored."""
    if mask_matrix is None:
        weights = arrays.priorities
    else:
        weights = arrays.priorities * ~mask_matrix
    denominators = weights.sum(axis=1)
    if np.any(denominators <= 0):
        bad = int(np.argmax(denominators <= 0))
        raise DegeneratePriorities(
            f"respondent index {bad}: every unmasked criterion has zero priority"
        )
    numerators = np.einsum("nmc,nc->nm", tensor, weights)
    return numerators / denominators[:, None]


def classification_codes(
    scores: np.ndarray, available: np.ndarray, usual: np.ndarray
) -> np.ndarray:
    """(n,) int8 vector of RATIONAL/IRRATIONAL/CONSTRAINED codes."""
    n = scores.shape[0]
    top_all = scores.max(axis=1)
    best_overall = scores >= (top_all - TIE_TOLERANCE)[:, None]
    available_scores = np.where(available, scores, -np.inf)
    top_available = available_scores.max(axis=1)
    best_available = (scores >= (top_available - TIE_TOLERANCE)[:, None]) & available
    constrained = ~np.any(best_overall & available, axis=1)
    usual_ok = best_available[np.arange(n), usual]
    return np.where(
        constrained, CONSTRAINED_CODE, np.where(usual_ok, RATIONAL_CODE, IRRATIONAL_CODE)
    ).astype(np.int8)


def classify_all(
    pop: Population,
    src: EvalSource = SelfEvals(),
    mask_matrix: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Vectorized classify over a whole population."""
    arrays = pop.arrays
    tensor = effective_tensor(arrays, src)
    scores = scores_tensor(arrays, tensor, mask_matrix)
    return classification_codes(scores, arrays.available, arrays.usual)


def fixed_mask_matrix(n: int, mask: frozenset[Criterion]) -> Optional[np.ndarray]:
    if not mask:
        return None
    if len(mask) >= len(CRITERIA):
        raise DegeneratePriorities("mask covers all six criteria")
    row = np.array([c in mask for c in CRITERIA], dtype=bool)
    return np.broadcast_to(row, (n, 6))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def report_from_codes(
    codes: np.ndarray,
    usual: np.ndarray,
    eval_source: str,
    mask_field: object,
) -> dict:
    """Assemble the rationality report JSON body from classification codes."""
    by_mode: dict[str, dict] = {}
    for mi, m in enumerate(MODES):
        group = codes[usual == mi]
        entry: dict = {"count": int(group.size)}
        if group.size:
            entry["rational_pct"] = float(np.mean(group == RATIONAL_CODE) * 100)
            entry["irrational_pct"] = float(np.mean(group == IRRATIONAL_CODE) * 100)
            entry["constrained_pct"] = float(np.mean(group == CONSTRAINED_CODE) * 100)
        by_mode[m.value] = entry
    return {"by_mode": by_mode, "eval_source": eval_source, "mask": mask_field}


def rationality_report(
    pop: Population,
    src: EvalSource = SelfEvals(),
    mask: frozenset[Criterion] = NO_MASK,
    mask_provider: Optional[Callable[[Respondent], frozenset[Criterion]]] = None,
) -> dict:
    """Per-usual-mode rational/irrational/constrained percentages.

    A fixed mask applies to everyone; a mask_provider computes one mask per
    respondent and takes precedence over the fixed mask.
    """
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    mask_field: object
    if mask_provider is not None:
        mask_matrix = np.zeros((arrays.size, 6), dtype=bool)
        for i, r in enumerate(pop):
            for c in mask_provider(r):
                mask_matrix[i, CRITERION_INDEX[c]] = True
        mask_field = "per-respondent"
    else:
        mask_matrix = fixed_mask_matrix(arrays.size, mask)
        mask_field = [c.value for c in CRITERIA if c in mask]
    codes = classify_all(pop, src, mask_matrix)
    return report_from_codes(codes, arrays.usual, eval_source_label(src), mask_field)


def constrained_report(pop: Population) -> dict:
    """Constrained-choice counts, total and by gender (self evals, no mask)."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    codes = classify_all(pop)
    constrained = codes == CONSTRAINED_CODE
    by_gender = {
        g.value: int(np.count_nonzero(constrained & (arrays.gender == gi)))
        for gi, g in enumerate(GENDERS)
    }
    return {"total": int(np.count_nonzero(constrained)), "by_gender": by_gender}
