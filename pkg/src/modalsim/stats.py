"""Descriptive statistics over populations: group means, mode-score
distributions, modal split, accessibility, and deviation analyses.

All functions return full-precision values; rounding to two decimals happens
only in the report emitters. Group conventions: standard deviation divides
by N unless sample=True; the median of an even-sized group is the midpoint
of the two central values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .decision import EvalSource, SelfEvals, effective_tensor, scores_tensor
from .errors import EmptyGroup
from .model import (
    CRITERIA,
    GENDERS,
    MODE_INDEX,
    MODES,
    Criterion,
    Gender,
    Mode,
    Population,
    Respondent,
)


class Membership(enum.Enum):
    USERS = "Users"
    NON_USERS = "NonUsers"


@dataclass(frozen=True)
class GroupFilter:
    """Conjunctive respondent filter. Non-users of a mode are the users of
    any one of the other three modes."""

    usual_mode: Optional[Mode] = None
    users_of: Optional[tuple[Mode, Membership]] = None
    gender: Optional[Gender] = None

    def matches(self, r: Respondent) -> bool:
        if self.usual_mode is not None and r.usual_mode is not self.usual_mode:
            return False
        if self.users_of is not None:
            mode, membership = self.users_of
            if membership is Membership.USERS and r.usual_mode is not mode:
                return False
            if membership is Membership.NON_USERS and r.usual_mode is mode:
                return False
        if self.gender is not None and r.gender is not self.gender:
            return False
        return True

    def selection(self, pop: Population) -> np.ndarray:
        """Boolean mask over pop.arrays rows."""
        arrays = pop.arrays
        keep = np.ones(arrays.size, dtype=bool)
        if self.usual_mode is not None:
            keep &= arrays.usual == MODE_INDEX[self.usual_mode]
        if self.users_of is not None:
            mode, membership = self.users_of
            users = arrays.usual == MODE_INDEX[mode]
            keep &= users if membership is Membership.USERS else ~users
        if self.gender is not None:
            keep &= arrays.gender == GENDERS.index(self.gender)
        return keep

    def describe(self) -> str:
        parts = []
        if self.usual_mode is not None:
            parts.append(f"usual_mode={self.usual_mode.value}")
        if self.users_of is not None:
            mode, membership = self.users_of
            parts.append(f"{membership.value} of {mode.value}")
        if self.gender is not None:
            parts.append(f"gender={self.gender.value}")
        return ", ".join(parts) if parts else "everyone"


EVERYONE = GroupFilter()


def _selected(pop: Population, f: GroupFilter) -> np.ndarray:
    sel = f.selection(pop)
    if not sel.any():
        raise EmptyGroup(f"no respondents match filter ({f.describe()})")
    return sel


def mean_priorities(pop: Population, f: GroupFilter = EVERYONE) -> dict[Criterion, float]:
    """Per-criterion mean priority over the filtered group."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    sel = _selected(pop, f)
    means = pop.arrays.priorities[sel].mean(axis=0)
    return {c: float(means[i]) for i, c in enumerate(CRITERIA)}


def mean_evaluations(
    pop: Population, m: Mode, f: GroupFilter = EVERYONE
) -> dict[Criterion, float]:
    """Per-criterion mean evaluation of mode m over the filtered group."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    sel = _selected(pop, f)
    means = pop.arrays.evaluations[sel, MODE_INDEX[m], :].mean(axis=0)
    return {c: float(means[i]) for i, c in enumerate(CRITERIA)}


def score_stats(
    pop: Population,
    scorer: Optional[Callable[[Respondent, Mode], float]] = None,
    src: EvalSource = SelfEvals(),
    sample_stdev: bool = False,
) -> dict[Mode, dict[str, float]]:
    """Distribution of per-respondent mode scores.

    With no explicit scorer the vectorized engine is used on src. A custom
    scorer forces the per-respondent path.
    """
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    if scorer is None:
        scores = scores_tensor(arrays, effective_tensor(arrays, src))
    else:
        scores = np.array([[scorer(r, m) for m in MODES] for r in pop])

    ddof = 1 if sample_stdev else 0
    out: dict[Mode, dict[str, float]] = {}
    for mi, m in enumerate(MODES):
        column = scores[:, mi]
        entry = {
            "mean": float(column.mean()),
            "median": float(np.median(column)),
        }
        if column.size > ddof:
            entry["stdev"] = float(column.std(ddof=ddof))
        users = column[arrays.usual == mi]
        nonusers = column[arrays.usual != mi]
        if users.size:
            entry["users_mean"] = float(users.mean())
        if nonusers.size:
            entry["nonusers_mean"] = float(nonusers.mean())
        out[m] = entry
    return out


def modal_split(pop: Population) -> dict[Mode, float]:
    """Fraction of respondents declaring each usual mode; sums to one."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    counts = np.bincount(pop.arrays.usual, minlength=len(MODES))
    return {m: float(counts[mi] / len(pop)) for mi, m in enumerate(MODES)}


def accessibility_stats(pop: Population) -> dict:
    """Counts of respondents lacking each mode, plus a histogram of how many
    modes each respondent lacks (0..3; 4 is impossible)."""
    arrays = pop.arrays
    lacking = ~arrays.available
    per_mode = {
        m.value: int(lacking[:, mi].sum()) for mi, m in enumerate(MODES)
    }
    per_respondent = lacking.sum(axis=1)
    histogram = {
        k: int(np.count_nonzero(per_respondent == k)) for k in range(len(MODES))
    }
    return {"per_mode": per_mode, "histogram": histogram}


def deviation_users_vs_nonusers(
    pop: Population,
) -> dict[Mode, dict[Criterion, float]]:
    """Users' mean minus non-users' mean evaluation, per (mode, criterion)."""
    arrays = pop.arrays
    out: dict[Mode, dict[Criterion, float]] = {}
    for mi, m in enumerate(MODES):
        users = arrays.usual == mi
        if not users.any():
            raise EmptyGroup(f"mode {m.value} has no users")
        if users.all():
            raise EmptyGroup(f"mode {m.value} has no non-users")
        gap = (
            arrays.evaluations[users, mi, :].mean(axis=0)
            - arrays.evaluations[~users, mi, :].mean(axis=0)
        )
        out[m] = {c: float(gap[i]) for i, c in enumerate(CRITERIA)}
    return out


def pairwise_mode_deviation(
    pop: Population, criterion: Optional[Criterion] = None
) -> dict[Mode, dict[Mode, float]]:
    """How each usual-mode group's mean rating of every target mode deviates
    from the whole-population mean for that target.

    Restricted to one criterion when given, otherwise averaged across all
    six. Group deviations, weighted by group size, sum to zero per target.
    """
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    if criterion is None:
        ratings = arrays.evaluations.mean(axis=2)  # (n, 4)
    else:
        ratings = arrays.evaluations[:, :, CRITERIA.index(criterion)]
    grand = ratings.mean(axis=0)  # (4,)
    out: dict[Mode, dict[Mode, float]] = {}
    for oi, observer in enumerate(MODES):
        group = arrays.usual == oi
        if not group.any():
            raise EmptyGroup(f"mode {observer.value} has no users")
        group_means = ratings[group].mean(axis=0)
        out[observer] = {
            t: float(group_means[ti] - grand[ti]) for ti, t in enumerate(MODES)
        }
    return out


def gender_report(pop: Population) -> dict:
    """Counts per gender plus Woman/Man mean priorities and evaluations."""
    arrays = pop.arrays
    counts = {
        g.value: int(np.count_nonzero(arrays.gender == gi))
        for gi, g in enumerate(GENDERS)
    }
    report: dict = {"counts": counts, "mean_priorities": {}, "mean_evaluations": {}}
    for g in (Gender.WOMAN, Gender.MAN):
        if counts[g.value] == 0:
            raise EmptyGroup(f"no {g.value} respondents")
        f = GroupFilter(gender=g)
        report["mean_priorities"][g.value] = {
            c.value: v for c, v in mean_priorities(pop, f).items()
        }
        report["mean_evaluations"][g.value] = {
            m.value: {c.value: v for c, v in mean_evaluations(pop, m, f).items()}
            for m in MODES
        }
    return report
