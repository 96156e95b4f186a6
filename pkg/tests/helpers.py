"""Builders shared across the test suite."""

from __future__ import annotations

import io

from modalsim.model import (
    CRITERIA,
    MODES,
    Criterion,
    EvaluationMatrix,
    Gender,
    Mode,
    Population,
    PriorityProfile,
    Respondent,
    SurveyProvenance,
)


def make_respondent(
    rid: str = "r1",
    gender: Gender = Gender.WOMAN,
    usual: Mode = Mode.BICYCLE,
    unavailable: set[Mode] | frozenset[Mode] = frozenset(),
    priorities: dict[Criterion, float] | None = None,
    evaluations: dict[Mode, dict[Criterion, float]] | None = None,
    distance_km: float = 5.0,
    trips_per_week: float = 10.0,
) -> Respondent:
    if priorities is None:
        priorities = {c: 5 for c in CRITERIA}
    if evaluations is None:
        evaluations = {m: {c: 5 for c in CRITERIA} for m in MODES}
    return Respondent(
        id=rid,
        gender=gender,
        usual_mode=usual,
        distance_km=distance_km,
        trips_per_week=trips_per_week,
        unavailable=frozenset(unavailable),
        priorities=PriorityProfile.from_mapping(priorities),
        evaluations=EvaluationMatrix.from_mapping(evaluations),
        outlier_flags=frozenset(),
    )


def make_population(respondents) -> Population:
    return Population(
        respondents=tuple(respondents),
        provenance=SurveyProvenance(source="test", row_count=len(respondents)),
    )


def survey_csv(rows: list[dict[str, str]]) -> bytes:
    """Render rows (logical field name -> cell text) as a default-schema CSV."""
    import csv as _csv

    from modalsim.survey import DEFAULT_SCHEMA_MAP

    columns = list(DEFAULT_SCHEMA_MAP.values())
    if not any("id" in row for row in rows):
        columns.remove("id")
    buf = io.StringIO()
    writer = _csv.DictWriter(buf, fieldnames=columns)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def full_row(**overrides: str) -> dict[str, str]:
    """A complete valid CSV row; override individual cells by column name."""
    row = {
        "gender": "Woman",
        "usual_mode": "Bicycle",
        "distance_km": "5",
        "trips_per_week": "10",
        "unavailable_modes": "",
    }
    for c in CRITERIA:
        row[f"prio_{c.value.lower()}"] = "5"
    for m in MODES:
        for c in CRITERIA:
            row[f"eval_{m.value.lower()}_{c.value.lower()}"] = "5"
    row.update(overrides)
    return row


def random_population(seed: int, n: int, unavailable_prob: float = 0.12):
    """Seeded population of uniform-random integer ratings, for bulk checks."""
    import numpy as np

    from modalsim.model import (
        GENDERS,
        Population,
        SyntheticProvenance,
    )

    rng = np.random.default_rng(seed)
    prios = rng.integers(0, 11, size=(n, 6))
    for i in np.flatnonzero(~prios.any(axis=1)):
        prios[i, rng.integers(6)] = rng.integers(1, 11)
    evals = rng.integers(0, 11, size=(n, 4, 6))
    unavailable_draws = rng.random((n, 4)) < unavailable_prob
    genders = rng.integers(0, 4, size=n)

    respondents = []
    for i in range(n):
        unavailable = {m for mi, m in enumerate(MODES) if unavailable_draws[i, mi]}
        if len(unavailable) == len(MODES):
            unavailable.pop()
        available = [m for m in MODES if m not in unavailable]
        usual = available[rng.integers(len(available))]
        respondents.append(
            Respondent(
                id=f"r{i}",
                gender=GENDERS[genders[i]],
                usual_mode=usual,
                distance_km=float(rng.integers(0, 40)),
                trips_per_week=float(rng.integers(0, 20)),
                unavailable=frozenset(unavailable),
                priorities=PriorityProfile(values=tuple(int(v) for v in prios[i])),
                evaluations=EvaluationMatrix(
                    values=tuple(tuple(int(v) for v in row) for row in evals[i])
                ),
                outlier_flags=frozenset(),
            )
        )
    return Population(
        respondents=tuple(respondents),
        provenance=SyntheticProvenance(seed=seed, config_digest="uniform-test"),
    )
