"""CSV ingestion and canonical JSON serialization."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modalsim.errors import (
    AllModesUnavailable,
    BadGender,
    BadMode,
    BadNumeric,
    BadRating,
    DegeneratePriorities,
    MalformedDocument,
    MissingColumn,
)
from modalsim.model import (
    CRITERIA,
    MODES,
    Criterion,
    Gender,
    Mode,
    SurveyProvenance,
    SyntheticProvenance,
)
from modalsim.survey import (
    FLAG_DISTANCE_OUTLIER,
    FLAG_TRIPS_OUTLIER,
    FLAG_USUAL_MARKED_UNAVAILABLE,
    parse_survey_csv,
    population_to_document,
    read_canonical_json,
    write_canonical_json,
)

from helpers import full_row, make_population, make_respondent, survey_csv


class TestParsing:
    def test_single_valid_row(self):
        pop = parse_survey_csv(survey_csv([full_row()]))
        assert len(pop) == 1
        r = pop[0]
        assert r.gender is Gender.WOMAN
        assert r.usual_mode is Mode.BICYCLE
        assert r.distance_km == 5.0
        assert r.unavailable == frozenset()
        assert r.outlier_flags == frozenset()
        assert r.id == "row-2"

    def test_explicit_id_column(self):
        pop = parse_survey_csv(survey_csv([{**full_row(), "id": "p42"}]))
        assert pop[0].id == "p42"

    def test_mode_and_gender_aliases(self):
        row = full_row(gender="female", usual_mode="bike", unavailable_modes="public transport; walking")
        pop = parse_survey_csv(survey_csv([row]))
        r = pop[0]
        assert r.gender is Gender.WOMAN
        assert r.usual_mode is Mode.BICYCLE
        assert r.unavailable == frozenset({Mode.BUS, Mode.WALK})

    def test_blank_lines_skipped(self):
        data = survey_csv([full_row()]) + b"\n\n"
        assert len(parse_survey_csv(data)) == 1

    def test_utf8_bom_tolerated(self):
        data = b"\xef\xbb\xbf" + survey_csv([full_row()])
        assert len(parse_survey_csv(data)) == 1

    def test_missing_column(self):
        import csv as _csv
        import io

        from modalsim.survey import DEFAULT_SCHEMA_MAP

        columns = [c for c in DEFAULT_SCHEMA_MAP.values() if c != "gender"]
        buf = io.StringIO()
        w = _csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        w.writerow({k: v for k, v in full_row().items() if k != "gender"})
        with pytest.raises(MissingColumn) as exc:
            parse_survey_csv(buf.getvalue())
        assert exc.value.column == "gender"

    def test_schema_map_rebinds_columns(self):
        data = survey_csv([full_row()]).decode().replace("usual_mode", "main_transport", 1)
        pop = parse_survey_csv(data, schema_map={"usual_mode": "main_transport"})
        assert pop[0].usual_mode is Mode.BICYCLE

    @pytest.mark.parametrize("cell", ["-1", "11", "4.5", "x", ""])
    def test_bad_rating(self, cell):
        with pytest.raises(BadRating) as exc:
            parse_survey_csv(survey_csv([full_row(prio_time=cell)]))
        assert exc.value.row == 2
        assert exc.value.column == "prio_time"

    def test_bad_rating_in_evaluation(self):
        with pytest.raises(BadRating) as exc:
            parse_survey_csv(survey_csv([full_row(eval_car_safety="10.5")]))
        assert exc.value.column == "eval_car_safety"

    def test_bad_gender(self):
        with pytest.raises(BadGender):
            parse_survey_csv(survey_csv([full_row(gender="xyz")]))

    def test_bad_usual_mode(self):
        with pytest.raises(BadMode):
            parse_survey_csv(survey_csv([full_row(usual_mode="scooter")]))

    def test_bad_unavailable_token(self):
        with pytest.raises(BadMode) as exc:
            parse_survey_csv(survey_csv([full_row(unavailable_modes="car;tram")]))
        assert exc.value.value == "tram"

    def test_bad_distance(self):
        with pytest.raises(BadNumeric):
            parse_survey_csv(survey_csv([full_row(distance_km="-3")]))

    def test_all_modes_unavailable(self):
        with pytest.raises(AllModesUnavailable) as exc:
            parse_survey_csv(
                survey_csv([full_row(usual_mode="car", unavailable_modes="bicycle;car;bus;walk")])
            )
        assert exc.value.row == 2

    def test_all_zero_priorities(self):
        row = full_row(**{f"prio_{c.value.lower()}": "0" for c in CRITERIA})
        with pytest.raises(DegeneratePriorities) as exc:
            parse_survey_csv(survey_csv([row]))
        assert "row 2" in str(exc.value)

    def test_row_number_in_errors_counts_from_two(self):
        rows = [full_row(), full_row(prio_time="99")]
        with pytest.raises(BadRating) as exc:
            parse_survey_csv(survey_csv(rows))
        assert exc.value.row == 3

    def test_usual_mode_marked_unavailable_is_reconciled(self):
        pop = parse_survey_csv(
            survey_csv([full_row(usual_mode="car", unavailable_modes="car;bus")])
        )
        r = pop[0]
        assert r.usual_mode is Mode.CAR
        assert r.unavailable == frozenset({Mode.BUS})
        assert FLAG_USUAL_MARKED_UNAVAILABLE in r.outlier_flags

    def test_outlier_flags_retained_not_dropped(self):
        pop = parse_survey_csv(
            survey_csv([full_row(distance_km="250", trips_per_week="45")])
        )
        r = pop[0]
        assert r.distance_km == 250.0
        assert r.trips_per_week == 45.0
        assert {FLAG_DISTANCE_OUTLIER, FLAG_TRIPS_OUTLIER} <= r.outlier_flags

    def test_boundary_values_not_flagged(self):
        pop = parse_survey_csv(survey_csv([full_row(distance_km="200", trips_per_week="30")]))
        assert pop[0].outlier_flags == frozenset()

    def test_provenance(self):
        pop = parse_survey_csv(survey_csv([full_row()]), source="survey.csv")
        assert pop.provenance == SurveyProvenance(source="survey.csv", row_count=1)


class TestCanonicalJson:
    def test_round_trip(self, tiny_population):
        blob = write_canonical_json(tiny_population)
        again = read_canonical_json(blob)
        assert again.respondents == tiny_population.respondents
        assert again.provenance == tiny_population.provenance

    def test_format_version_present(self, tiny_population):
        doc = json.loads(write_canonical_json(tiny_population))
        assert doc["format_version"] == 1

    def test_canonical_field_order_is_stable(self, tiny_population):
        doc = json.loads(write_canonical_json(tiny_population))
        r = doc["respondents"][0]
        assert list(r["priorities"]) == [c.value for c in CRITERIA]
        assert list(r["evaluations"]) == [m.value for m in MODES]
        assert list(r) == [
            "id",
            "gender",
            "usual_mode",
            "distance_km",
            "trips_per_week",
            "unavailable",
            "priorities",
            "evaluations",
            "outlier_flags",
        ]

    def test_byte_identical_for_equal_populations(self, tiny_population):
        assert write_canonical_json(tiny_population) == write_canonical_json(tiny_population)

    def test_synthetic_provenance_round_trip(self):
        pop = make_population([make_respondent("s1")])
        pop = type(pop)(
            respondents=pop.respondents,
            provenance=SyntheticProvenance(seed=7, config_digest="abc123"),
        )
        again = read_canonical_json(write_canonical_json(pop))
        assert again.provenance == SyntheticProvenance(seed=7, config_digest="abc123")

    def test_rejects_non_json(self):
        with pytest.raises(MalformedDocument):
            read_canonical_json(b"not json {")

    def test_rejects_wrong_version(self, tiny_population):
        doc = population_to_document(tiny_population)
        doc["format_version"] = 2
        with pytest.raises(MalformedDocument):
            read_canonical_json(json.dumps(doc))

    def test_rejects_out_of_range_rating(self, tiny_population):
        doc = population_to_document(tiny_population)
        doc["respondents"][0]["evaluations"]["Car"]["Time"] = 17
        with pytest.raises(MalformedDocument):
            read_canonical_json(json.dumps(doc))

    def test_rejects_duplicate_ids(self, tiny_population):
        doc = population_to_document(tiny_population)
        doc["respondents"][1]["id"] = doc["respondents"][0]["id"]
        with pytest.raises(MalformedDocument):
            read_canonical_json(json.dumps(doc))

    def test_rejects_usual_mode_unavailable(self, tiny_population):
        doc = population_to_document(tiny_population)
        r = doc["respondents"][0]
        r["unavailable"] = [r["usual_mode"]]
        with pytest.raises(MalformedDocument):
            read_canonical_json(json.dumps(doc))

    def test_rejects_missing_criterion_key(self, tiny_population):
        doc = population_to_document(tiny_population)
        del doc["respondents"][0]["priorities"]["Time"]
        with pytest.raises(MalformedDocument):
            read_canonical_json(json.dumps(doc))


# Property tests: arbitrary valid rows survive CSV -> model -> JSON -> model.

rating = st.integers(min_value=0, max_value=10)


@st.composite
def valid_row(draw) -> dict[str, str]:
    gender = draw(st.sampled_from(["Woman", "Man", "Other", "NoAnswer"]))
    usual = draw(st.sampled_from(MODES))
    others = [m for m in MODES if m is not usual]
    unavailable = draw(st.sets(st.sampled_from(others), max_size=2))
    prios = {c: draw(rating) for c in CRITERIA}
    if all(v == 0 for v in prios.values()):
        prios[Criterion.TIME] = 1
    row = full_row(
        gender=gender,
        usual_mode=usual.value,
        unavailable_modes=";".join(m.value for m in unavailable),
        distance_km=str(draw(st.floats(min_value=0, max_value=500, allow_nan=False))),
        trips_per_week=str(draw(st.integers(min_value=0, max_value=60))),
    )
    for c in CRITERIA:
        row[f"prio_{c.value.lower()}"] = str(prios[c])
    for m in MODES:
        for c in CRITERIA:
            row[f"eval_{m.value.lower()}_{c.value.lower()}"] = str(draw(rating))
    return row


@settings(max_examples=60, deadline=None)
@given(rows=st.lists(valid_row(), min_size=1, max_size=5))
def test_parse_then_json_round_trip(rows):
    pop = parse_survey_csv(survey_csv(rows))
    assert len(pop) == len(rows)
    again = read_canonical_json(write_canonical_json(pop))
    assert again.respondents == pop.respondents
