"""Shared fixtures. Builders live in helpers.py."""

from __future__ import annotations

import pytest

from helpers import make_population, make_respondent
from modalsim.model import CRITERIA, MODES, Criterion, Gender, Mode, Population


@pytest.fixture
def tiny_population() -> Population:
    """Three respondents with distinct usual modes and one unavailability."""
    r1 = make_respondent(
        "a",
        gender=Gender.WOMAN,
        usual=Mode.BICYCLE,
        priorities={c: i + 1 for i, c in enumerate(CRITERIA)},
        evaluations={
            m: {c: (mi + ci) % 11 for ci, c in enumerate(CRITERIA)}
            for mi, m in enumerate(MODES)
        },
    )
    r2 = make_respondent(
        "b",
        gender=Gender.MAN,
        usual=Mode.CAR,
        unavailable={Mode.BUS},
        priorities={c: 10 - i for i, c in enumerate(CRITERIA)},
        evaluations={
            m: {c: (3 * mi + 2 * ci) % 11 for ci, c in enumerate(CRITERIA)}
            for mi, m in enumerate(MODES)
        },
    )
    r3 = make_respondent(
        "c",
        gender=Gender.NO_ANSWER,
        usual=Mode.WALK,
        priorities={c: 1 if c is Criterion.TIME else 3 for c in CRITERIA},
        evaluations={
            m: {c: 10 - ((mi + 2 * ci) % 11) for ci, c in enumerate(CRITERIA)}
            for mi, m in enumerate(MODES)
        },
    )
    return make_population([r1, r2, r3])
