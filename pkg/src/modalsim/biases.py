"""Cognitive-bias operationalizations.

Choice-supportive bias is a comparison of evaluation sources: biased
decisions run on self evaluations, debiased ones on crowd medians
(see decision.Crowd). This module supplies the medians plus the other two
mechanisms: halo (masking criteria the usual mode is worst at) and
reactance (down-rating promoted modes out of defiance).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .decision import (
    IRRATIONAL_CODE,
    RATIONAL_CODE,
    EvalSource,
    SelfEvals,
    classification_codes,
    classify_all,
    effective_matrix,
    effective_tensor,
    eval_source_label,
    report_from_codes,
    scores_tensor,
)
from .errors import BadConfig, EmptyGroup
from .model import (
    CRITERIA,
    CRITERION_INDEX,
    MODE_INDEX,
    MODES,
    Criterion,
    EvaluationMatrix,
    Mode,
    Population,
    PopulationArrays,
    Respondent,
)


def crowd_medians(pop: Population) -> EvaluationMatrix:
    """Per-cell median rating over the whole population.

    Even-sized populations use the midpoint of the two central values, so
    cells may be half-integral.
    """
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    cells = np.median(pop.arrays.evaluations, axis=0)
    return EvaluationMatrix(tuple(tuple(float(v) for v in row) for row in cells))


# ---------------------------------------------------------------------------
# Halo: ignore criteria on which the usual mode does worst
# ---------------------------------------------------------------------------


class HaloComparison(enum.Enum):
    """Which rivals define "worst": only modes the respondent can use, or
    all four modes."""

    AVAILABLE = "available"
    ALL = "all"


# Default is the all-mode comparison: with the available-only rule, masking
# a criterion can lift an unavailable mode (rated even lower there) above
# everything else, flipping a rational decision to constrained. The all-mode
# rule provably never un-rationalizes anyone.
DEFAULT_HALO_COMPARISON = HaloComparison.ALL


def halo_mask(
    r: Respondent,
    src: EvalSource = SelfEvals(),
    comparison: HaloComparison = DEFAULT_HALO_COMPARISON,
) -> frozenset[Criterion]:
    """Criteria where the usual mode rates strictly below every rival.

    Ties on the minimum do not mask. A respondent with no rivals (sole
    available mode) gets an empty mask. If the masked-out set would leave
    zero total priority, criteria are unmasked in descending usual-mode
    rating order until scores are defined again.
    """
    evals = effective_matrix(r, src)
    if comparison is HaloComparison.ALL:
        rivals = [m for m in MODES if m is not r.usual_mode]
    else:
        rivals = [m for m in r.available if m is not r.usual_mode]
    if not rivals:
        return frozenset()

    masked = {
        c
        for c in CRITERIA
        if all(evals[r.usual_mode, c] < evals[m, c] for m in rivals)
    }
    unmask_order = sorted(
        CRITERIA, key=lambda c: (-evals[r.usual_mode, c], CRITERION_INDEX[c])
    )
    for c in unmask_order:
        if sum(r.priorities[x] for x in CRITERIA if x not in masked) > 0:
            break
        masked.discard(c)
    return frozenset(masked)


def halo_mask_matrix(
    arrays: PopulationArrays,
    tensor: np.ndarray,
    comparison: HaloComparison = DEFAULT_HALO_COMPARISON,
) -> np.ndarray:
    """(n, 6) boolean mask; vectorized counterpart of halo_mask."""
    n = arrays.size
    rows = np.arange(n)
    usual_vals = tensor[rows, arrays.usual, :]  # (n, 6)
    if comparison is HaloComparison.ALL:
        rival = np.ones((n, len(MODES)), dtype=bool)
    else:
        rival = arrays.available.copy()
    rival[rows, arrays.usual] = False
    has_rivals = rival.any(axis=1)
    rival_min = np.where(rival[:, :, None], tensor, np.inf).min(axis=1)  # (n, 6)
    mask = (usual_vals < rival_min) & has_rivals[:, None]

    leftover = (arrays.priorities * ~mask).sum(axis=1)
    for i in np.flatnonzero(leftover <= 0):
        for ci in np.argsort(-usual_vals[i], kind="stable"):
            if not mask[i, ci]:
                continue
            mask[i, ci] = False
            if (arrays.priorities[i] * ~mask[i]).sum() > 0:
                break
    return mask


def halo_rationality_report(
    pop: Population,
    src: EvalSource = SelfEvals(),
    comparison: HaloComparison = DEFAULT_HALO_COMPARISON,
) -> dict:
    """rationality_report with each respondent's halo mask applied."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    tensor = effective_tensor(arrays, src)
    mask = halo_mask_matrix(arrays, tensor, comparison)
    scores = scores_tensor(arrays, tensor, mask)
    codes = classification_codes(scores, arrays.available, arrays.usual)
    return report_from_codes(codes, arrays.usual, eval_source_label(src), "halo")


def halo_classification_codes(
    pop: Population,
    src: EvalSource = SelfEvals(),
    comparison: HaloComparison = DEFAULT_HALO_COMPARISON,
) -> np.ndarray:
    """Per-respondent classification codes under the halo mask."""
    arrays = pop.arrays
    tensor = effective_tensor(arrays, src)
    mask = halo_mask_matrix(arrays, tensor, comparison)
    scores = scores_tensor(arrays, tensor, mask)
    return classification_codes(scores, arrays.available, arrays.usual)


def halo_rescue_table(pop: Population) -> dict[Mode, dict[Criterion, int]]:
    """How many baseline-irrational decisions each single-criterion mask
    turns rational, keyed by usual mode.

    Self evaluations throughout. A respondent can appear under several
    criteria. Criteria whose removal leaves zero total priority cannot
    rescue anyone (the score would be undefined) and are skipped.
    """
    arrays = pop.arrays
    table: dict[Mode, dict[Criterion, int]] = {
        m: {c: 0 for c in CRITERIA} for m in MODES
    }
    if len(pop) == 0:
        return table
    baseline = classify_all(pop)
    candidates = np.flatnonzero(baseline == IRRATIONAL_CODE)
    if candidates.size == 0:
        return table

    tensor = arrays.evaluations[candidates]
    priorities = arrays.priorities[candidates]
    available = arrays.available[candidates]
    usual = arrays.usual[candidates]
    for ci, c in enumerate(CRITERIA):
        weights = priorities.copy()
        weights[:, ci] = 0
        denominators = weights.sum(axis=1)
        defined = denominators > 0
        if not defined.any():
            continue
        scores = (
            np.einsum("kmc,kc->km", tensor[defined], weights[defined])
            / denominators[defined][:, None]
        )
        codes = classification_codes(scores, available[defined], usual[defined])
        rescued_usual = usual[defined][codes == RATIONAL_CODE]
        for mi, count in zip(*np.unique(rescued_usual, return_counts=True)):
            table[MODES[int(mi)]][c] += int(count)
    return table


# ---------------------------------------------------------------------------
# Reactance: defiant down-rating of promoted modes by non-users
# ---------------------------------------------------------------------------


class ReactanceScope(enum.Enum):
    PROMOTED_CRITERION_ONLY = "PromotedCriterionOnly"
    ALL_CRITERIA = "AllCriteria"


@dataclass(frozen=True)
class ReactanceParams:
    """Penalty subtracted from promoted cells in non-users' eyes.

    Under ALL_CRITERIA the penalty hits every criterion of a promoted mode
    once, no matter how many of its cells were promoted.
    """

    delta: float = 1.0
    scope: ReactanceScope = ReactanceScope.PROMOTED_CRITERION_ONLY

    def __post_init__(self):
        if not (
            isinstance(self.delta, (int, float))
            and not isinstance(self.delta, bool)
            and np.isfinite(self.delta)
            and self.delta >= 0
        ):
            raise BadConfig(f"reactance penalty must be a number >= 0, got {self.delta!r}")


def apply_reactance(
    r: Respondent,
    promoted: frozenset[tuple[Mode, Criterion]],
    params: ReactanceParams = ReactanceParams(),
) -> EvaluationMatrix:
    """The respondent's evaluations after the defiance penalty.

    Cells of the respondent's own usual mode are never touched.
    """
    if params.delta == 0 or not promoted:
        return r.evaluations
    cells = [list(row) for row in r.evaluations.values]
    if params.scope is ReactanceScope.ALL_CRITERIA:
        for mode in {m for m, _ in promoted}:
            if mode is r.usual_mode:
                continue
            mi = MODE_INDEX[mode]
            for ci in range(len(CRITERIA)):
                cells[mi][ci] = max(0.0, cells[mi][ci] - params.delta)
    else:
        for mode, criterion in promoted:
            if mode is r.usual_mode:
                continue
            mi, ci = MODE_INDEX[mode], CRITERION_INDEX[criterion]
            cells[mi][ci] = max(0.0, cells[mi][ci] - params.delta)
    return EvaluationMatrix(tuple(tuple(row) for row in cells))


def reactance_tensor(
    tensor: np.ndarray,
    usual: np.ndarray,
    promoted: frozenset[tuple[Mode, Criterion]],
    params: ReactanceParams = ReactanceParams(),
) -> np.ndarray:
    """Vectorized apply_reactance over an (n, 4, 6) tensor. Returns a new
    array (or the input unchanged when the penalty is a no-op)."""
    if params.delta == 0 or not promoted:
        return tensor
    out = np.array(tensor, dtype=float)
    if params.scope is ReactanceScope.ALL_CRITERIA:
        targets = [(MODE_INDEX[m], slice(None)) for m in {m for m, _ in promoted}]
    else:
        targets = [
            (MODE_INDEX[m], CRITERION_INDEX[c]) for m, c in promoted
        ]
    for mi, csel in targets:
        affected = usual != mi
        out[affected, mi, csel] = np.clip(
            out[affected, mi, csel] - params.delta, 0.0, 10.0
        )
    return out
