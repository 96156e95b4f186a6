"""Core domain types: criteria, modes, respondents, populations.

Ratings live on a 0-10 Likert scale. Integrality is enforced at the
parsing/serialization boundary (see survey.py), not by these types:
analysis code is allowed to inject real-valued priorities (e.g. for
scale-invariance checks) and crowd medians are half-integral.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Union

import numpy as np


class Criterion(enum.Enum):
    """The six decision criteria, in canonical order."""

    ECOLOGY = "Ecology"
    COMFORT = "Comfort"
    FINANCE = "Finance"
    PRACTICALITY = "Practicality"
    TIME = "Time"
    SAFETY = "Safety"


class Mode(enum.Enum):
    """The four mobility modes, in canonical order."""

    BICYCLE = "Bicycle"
    CAR = "Car"
    BUS = "Bus"
    WALK = "Walk"


class Gender(enum.Enum):
    WOMAN = "Woman"
    MAN = "Man"
    OTHER = "Other"
    NO_ANSWER = "NoAnswer"


CRITERIA: tuple[Criterion, ...] = tuple(Criterion)
MODES: tuple[Mode, ...] = tuple(Mode)
GENDERS: tuple[Gender, ...] = tuple(Gender)

CRITERION_INDEX: dict[Criterion, int] = {c: i for i, c in enumerate(CRITERIA)}
MODE_INDEX: dict[Mode, int] = {m: i for i, m in enumerate(MODES)}

RATING_MIN = 0
RATING_MAX = 10


def is_valid_rating(value: object) -> bool:
    """True if value is an integral number in [0, 10]."""
    if isinstance(value, bool):
        return False
    if not isinstance(value, (int, float)):
        return False
    return (
        math.isfinite(value)
        and float(value).is_integer()
        and RATING_MIN <= value <= RATING_MAX
    )


@dataclass(frozen=True)
class PriorityProfile:
    """Per-criterion importance weights, stored in canonical criterion order.

    Weights must be finite, non-negative, and not all zero. Survey data is
    always integral 0-10; real-valued weights are accepted so that rescaled
    profiles can be analyzed directly.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(CRITERIA):
            raise ValueError(f"expected {len(CRITERIA)} priorities, got {len(self.values)}")
        if any(not math.isfinite(v) or v < 0 for v in self.values):
            raise ValueError(f"priorities must be finite and non-negative: {self.values}")
        if all(v == 0 for v in self.values):
            raise ValueError("priorities must not all be zero")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Criterion, float]) -> "PriorityProfile":
        return cls(tuple(float(mapping[c]) for c in CRITERIA))

    def __getitem__(self, criterion: Criterion) -> float:
        return self.values[CRITERION_INDEX[criterion]]

    def as_mapping(self) -> dict[Criterion, float]:
        return {c: self.values[i] for i, c in enumerate(CRITERIA)}

    def scaled(self, k: float) -> "PriorityProfile":
        return PriorityProfile(tuple(v * k for v in self.values))


@dataclass(frozen=True)
class EvaluationMatrix:
    """Ratings of every mode on every criterion (4x6, canonical orders).

    Cells must lie in [0, 10]; non-integral cells are legal (crowd medians,
    penalty-adjusted values).
    """

    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.values) != len(MODES) or any(
            len(row) != len(CRITERIA) for row in self.values
        ):
            raise ValueError("evaluation matrix must be 4 modes x 6 criteria")
        for row in self.values:
            for v in row:
                if not math.isfinite(v) or not (RATING_MIN <= v <= RATING_MAX):
                    raise ValueError(f"evaluation {v!r} outside [0, 10]")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Mode, Mapping[Criterion, float]]) -> "EvaluationMatrix":
        return cls(
            tuple(tuple(float(mapping[m][c]) for c in CRITERIA) for m in MODES)
        )

    def __getitem__(self, key: tuple[Mode, Criterion]) -> float:
        mode, criterion = key
        return self.values[MODE_INDEX[mode]][CRITERION_INDEX[criterion]]

    def as_mapping(self) -> dict[Mode, dict[Criterion, float]]:
        return {
            m: {c: self.values[i][j] for j, c in enumerate(CRITERIA)}
            for i, m in enumerate(MODES)
        }

    def with_cell(self, mode: Mode, criterion: Criterion, value: float) -> "EvaluationMatrix":
        rows = [list(row) for row in self.values]
        rows[MODE_INDEX[mode]][CRITERION_INDEX[criterion]] = float(value)
        return EvaluationMatrix(tuple(tuple(row) for row in rows))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class Respondent:
    """One survey answer (or one synthetic agent)."""

    id: str
    gender: Gender
    usual_mode: Mode
    distance_km: float
    trips_per_week: float
    unavailable: frozenset[Mode]
    priorities: PriorityProfile
    evaluations: EvaluationMatrix
    outlier_flags: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(self.unavailable) >= len(MODES):
            raise ValueError(f"respondent {self.id}: at least one mode must be accessible")
        if self.usual_mode in self.unavailable:
            raise ValueError(f"respondent {self.id}: usual mode marked unavailable")
        if self.distance_km < 0 or self.trips_per_week < 0:
            raise ValueError(f"respondent {self.id}: distance/trips must be non-negative")

    @property
    def available(self) -> tuple[Mode, ...]:
        return tuple(m for m in MODES if m not in self.unavailable)

    def uses(self, mode: Mode) -> bool:
        return self.usual_mode is mode


@dataclass(frozen=True)
class SurveyProvenance:
    source: str
    row_count: int


@dataclass(frozen=True)
class SyntheticProvenance:
    seed: int
    config_digest: str


Provenance = Union[SurveyProvenance, SyntheticProvenance]


@dataclass(frozen=True)
class PopulationArrays:
    """Dense views of a population for vectorized analysis.

    Shapes: priorities (n, 6), evaluations (n, 4, 6), available (n, 4) bool,
    usual (n,) int (canonical mode index), gender (n,) int (canonical index).
    All arrays are read-only.
    """

    priorities: np.ndarray
    evaluations: np.ndarray
    available: np.ndarray
    usual: np.ndarray
    gender: np.ndarray

    @property
    def size(self) -> int:
        return self.usual.shape[0]


@dataclass(frozen=True)
class Population:
    """Immutable, ordered collection of respondents with provenance."""

    respondents: tuple[Respondent, ...]
    provenance: Provenance

    def __post_init__(self):
        seen: set[str] = set()
        for r in self.respondents:
            if r.id in seen:
                raise ValueError(f"duplicate respondent id {r.id!r}")
            seen.add(r.id)

    def __len__(self) -> int:
        return len(self.respondents)

    def __iter__(self) -> Iterator[Respondent]:
        return iter(self.respondents)

    def __getitem__(self, i: int) -> Respondent:
        return self.respondents[i]

    @cached_property
    def arrays(self) -> PopulationArrays:
        n = len(self.respondents)
        prio = np.empty((n, len(CRITERIA)), dtype=float)
        evals = np.empty((n, len(MODES), len(CRITERIA)), dtype=float)
        avail = np.ones((n, len(MODES)), dtype=bool)
        usual = np.empty(n, dtype=np.int64)
        gender = np.empty(n, dtype=np.int64)
        for i, r in enumerate(self.respondents):
            prio[i] = r.priorities.values
            evals[i] = r.evaluations.values
            for m in r.unavailable:
                avail[i, MODE_INDEX[m]] = False
            usual[i] = MODE_INDEX[r.usual_mode]
            gender[i] = GENDERS.index(r.gender)
        for a in (prio, evals, avail, usual, gender):
            a.setflags(write=False)
        return PopulationArrays(prio, evals, avail, usual, gender)

    def subset_indices(self, indices: np.ndarray) -> tuple[Respondent, ...]:
        return tuple(self.respondents[int(i)] for i in indices)
