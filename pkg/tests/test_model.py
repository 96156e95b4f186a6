"""Core type invariants: enum orderings, rating validity, frozen dataclasses."""

import numpy as np
import pytest

from modalsim.model import (
    CRITERIA,
    GENDERS,
    MODES,
    Criterion,
    EvaluationMatrix,
    Gender,
    Mode,
    Population,
    PriorityProfile,
    Respondent,
    is_valid_rating,
)

from helpers import make_population, make_respondent


def test_canonical_criterion_order():
    assert [c.value for c in CRITERIA] == [
        "Ecology",
        "Comfort",
        "Finance",
        "Practicality",
        "Time",
        "Safety",
    ]


def test_canonical_mode_order():
    assert [m.value for m in MODES] == ["Bicycle", "Car", "Bus", "Walk"]


def test_canonical_gender_order():
    assert [g.value for g in GENDERS] == ["Woman", "Man", "Other", "NoAnswer"]


@pytest.mark.parametrize("value", [0, 5, 10, 7.0])
def test_valid_ratings(value):
    assert is_valid_rating(value)


@pytest.mark.parametrize(
    "value", [-1, 11, 5.5, float("nan"), float("inf"), "5", None, True, False]
)
def test_invalid_ratings(value):
    assert not is_valid_rating(value)


class TestPriorityProfile:
    def test_round_trip(self):
        mapping = {c: i + 1 for i, c in enumerate(CRITERIA)}
        p = PriorityProfile.from_mapping(mapping)
        assert p.as_mapping() == mapping
        assert p[Criterion.SAFETY] == 6

    def test_rejects_all_zero(self):
        with pytest.raises(ValueError):
            PriorityProfile.from_mapping({c: 0 for c in CRITERIA})

    def test_rejects_negative(self):
        bad = {c: 5 for c in CRITERIA}
        bad[Criterion.TIME] = -1
        with pytest.raises(ValueError):
            PriorityProfile.from_mapping(bad)

    def test_scaled(self):
        p = PriorityProfile.from_mapping({c: 2 for c in CRITERIA})
        assert p.scaled(3.5)[Criterion.ECOLOGY] == 7.0


class TestEvaluationMatrix:
    def test_round_trip_and_indexing(self):
        mapping = {
            m: {c: (mi * 6 + ci) % 11 for ci, c in enumerate(CRITERIA)}
            for mi, m in enumerate(MODES)
        }
        e = EvaluationMatrix.from_mapping(mapping)
        assert e.as_mapping() == mapping
        assert e[Mode.CAR, Criterion.ECOLOGY] == mapping[Mode.CAR][Criterion.ECOLOGY]

    def test_with_cell_replaces_single_entry(self):
        e = EvaluationMatrix.from_mapping({m: {c: 5 for c in CRITERIA} for m in MODES})
        e2 = e.with_cell(Mode.BUS, Criterion.FINANCE, 9)
        assert e2[Mode.BUS, Criterion.FINANCE] == 9
        assert e[Mode.BUS, Criterion.FINANCE] == 5
        others = [
            (m, c) for m in MODES for c in CRITERIA if (m, c) != (Mode.BUS, Criterion.FINANCE)
        ]
        assert all(e2[m, c] == 5 for m, c in others)

    def test_rejects_out_of_range(self):
        bad = {m: {c: 5 for c in CRITERIA} for m in MODES}
        bad[Mode.WALK][Criterion.TIME] = 12
        with pytest.raises(ValueError):
            EvaluationMatrix.from_mapping(bad)

    def test_as_array_layout(self):
        mapping = {
            m: {c: (mi + ci) % 11 for ci, c in enumerate(CRITERIA)}
            for mi, m in enumerate(MODES)
        }
        arr = EvaluationMatrix.from_mapping(mapping).as_array()
        assert arr.shape == (4, 6)
        for mi, m in enumerate(MODES):
            for ci, c in enumerate(CRITERIA):
                assert arr[mi, ci] == mapping[m][c]


class TestRespondent:
    def test_usual_mode_must_be_available(self):
        with pytest.raises(ValueError):
            make_respondent(usual=Mode.CAR, unavailable={Mode.CAR})

    def test_at_least_one_mode_available(self):
        with pytest.raises(ValueError):
            make_respondent(unavailable=set(MODES))

    def test_available_preserves_canonical_order(self):
        r = make_respondent(usual=Mode.BUS, unavailable={Mode.CAR})
        assert r.available == (Mode.BICYCLE, Mode.BUS, Mode.WALK)

    def test_uses(self):
        r = make_respondent(usual=Mode.WALK)
        assert r.uses(Mode.WALK) and not r.uses(Mode.CAR)

    def test_frozen(self):
        r = make_respondent()
        with pytest.raises(AttributeError):
            r.distance_km = 99  # type: ignore[misc]


class TestPopulation:
    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            make_population([make_respondent("x"), make_respondent("x")])

    def test_len_iter_getitem(self, tiny_population):
        assert len(tiny_population) == 3
        assert [r.id for r in tiny_population] == ["a", "b", "c"]
        assert tiny_population[1].id == "b"

    def test_arrays_mirror_respondents(self, tiny_population):
        arrs = tiny_population.arrays
        assert arrs.size == 3
        assert arrs.priorities.shape == (3, 6)
        assert arrs.evaluations.shape == (3, 4, 6)
        assert arrs.available.shape == (3, 4)
        for i, r in enumerate(tiny_population):
            np.testing.assert_array_equal(arrs.evaluations[i], r.evaluations.as_array())
            for mi, m in enumerate(MODES):
                assert arrs.available[i, mi] == (m not in r.unavailable)
            assert MODES[arrs.usual[i]] is r.usual_mode
            assert GENDERS[arrs.gender[i]] is r.gender
            for ci, c in enumerate(CRITERIA):
                assert arrs.priorities[i, ci] == r.priorities[c]

    def test_arrays_read_only(self, tiny_population):
        with pytest.raises(ValueError):
            tiny_population.arrays.priorities[0, 0] = 99
