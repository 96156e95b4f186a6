"""Survey CSV ingestion and the canonical JSON population snapshot format.

Column names are never hard-coded against a particular survey export: a
schema map binds each logical field to a column name, with documented
defaults. Parsing is strict about ratings and enumerations, but keeps
implausible distance/trips answers (tagged, never dropped).
"""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Mapping, Union

from .errors import (
    AllModesUnavailable,
    BadGender,
    BadMode,
    BadNumeric,
    BadRating,
    DegeneratePriorities,
    MalformedDocument,
    MissingColumn,
)
from .model import (
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
    SyntheticProvenance,
    is_valid_rating,
)

FORMAT_VERSION = 1

# Tags attached to retained-but-suspect rows.
FLAG_DISTANCE_OUTLIER = "distance_outlier"
FLAG_TRIPS_OUTLIER = "trips_outlier"
FLAG_USUAL_MARKED_UNAVAILABLE = "usual_marked_unavailable"

DISTANCE_OUTLIER_KM = 200.0
TRIPS_OUTLIER_PER_WEEK = 30.0

# Logical fields -> default column names. A schema map may rebind any of
# them; "id" is optional (row numbers are used when absent), and the
# unavailable-modes column holds semicolon-separated mode tokens.
DEFAULT_SCHEMA_MAP: dict[str, str] = {
    "id": "id",
    "gender": "gender",
    "usual_mode": "usual_mode",
    "distance_km": "distance_km",
    "trips_per_week": "trips_per_week",
    "unavailable_modes": "unavailable_modes",
    **{f"prio_{c.value.lower()}": f"prio_{c.value.lower()}" for c in CRITERIA},
    **{
        f"eval_{m.value.lower()}_{c.value.lower()}": f"eval_{m.value.lower()}_{c.value.lower()}"
        for m in MODES
        for c in CRITERIA
    },
}

UNAVAILABLE_SEPARATOR = ";"

_MODE_TOKENS = {
    "bicycle": Mode.BICYCLE,
    "bike": Mode.BICYCLE,
    "car": Mode.CAR,
    "bus": Mode.BUS,
    "public transport": Mode.BUS,
    "public_transport": Mode.BUS,
    "pt": Mode.BUS,
    "walk": Mode.WALK,
    "walking": Mode.WALK,
    "foot": Mode.WALK,
}

_GENDER_TOKENS = {
    "woman": Gender.WOMAN,
    "female": Gender.WOMAN,
    "f": Gender.WOMAN,
    "man": Gender.MAN,
    "male": Gender.MAN,
    "m": Gender.MAN,
    "other": Gender.OTHER,
    "noanswer": Gender.NO_ANSWER,
    "no_answer": Gender.NO_ANSWER,
    "no answer": Gender.NO_ANSWER,
    "na": Gender.NO_ANSWER,
    "do not wish to answer": Gender.NO_ANSWER,
}

_NO_UNAVAILABLE_TOKENS = {"", "none", "-"}


def parse_mode_token(token: str) -> Mode | None:
    return _MODE_TOKENS.get(token.strip().lower())


def parse_gender_token(token: str) -> Gender | None:
    return _GENDER_TOKENS.get(token.strip().lower())


def _parse_rating(raw: str, row: int, column: str) -> int:
    text = raw.strip()
    try:
        value = float(text)
    except ValueError:
        raise BadRating(row, column, raw) from None
    if not is_valid_rating(value):
        raise BadRating(row, column, raw)
    return int(value)


def _parse_non_negative(raw: str, row: int, column: str) -> float:
    text = raw.strip()
    if text == "":
        return 0.0
    try:
        value = float(text)
    except ValueError:
        raise BadNumeric(row, column, raw) from None
    if not (value >= 0):  # also rejects NaN
        raise BadNumeric(row, column, raw)
    return value


def parse_survey_csv(
    data: Union[bytes, str, IO[str], IO[bytes]],
    schema_map: Mapping[str, str] | None = None,
    source: str = "<memory>",
) -> Population:
    """Parse a survey CSV export into a Population.

    Raises MissingColumn/BadRating/BadNumeric/BadMode/BadGender/
    AllModesUnavailable with row and column context on invalid input.
    Implausible distance/trips values are retained with an outlier flag.
    """
    text = _as_text(data)
    schema = dict(DEFAULT_SCHEMA_MAP)
    if schema_map:
        schema.update(schema_map)

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn(schema["gender"]) from None
    header = [h.strip() for h in header]
    col_index: dict[str, int] = {}
    for field, column in schema.items():
        if field == "id" and column not in header:
            continue  # id binding is optional
        if column not in header:
            if field == "id":
                continue
            raise MissingColumn(column)
        col_index[field] = header.index(column)

    respondents: list[Respondent] = []
    for row_number, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue

        def cell(field: str) -> str:
            idx = col_index[field]
            return row[idx] if idx < len(row) else ""

        gender_raw = cell("gender")
        gender = parse_gender_token(gender_raw)
        if gender is None:
            raise BadGender(row_number, schema["gender"], gender_raw)

        usual_raw = cell("usual_mode")
        usual = parse_mode_token(usual_raw)
        if usual is None:
            raise BadMode(row_number, schema["usual_mode"], usual_raw)

        distance = _parse_non_negative(cell("distance_km"), row_number, schema["distance_km"])
        trips = _parse_non_negative(
            cell("trips_per_week"), row_number, schema["trips_per_week"]
        )

        unavailable: set[Mode] = set()
        unavailable_raw = cell("unavailable_modes")
        for token in unavailable_raw.split(UNAVAILABLE_SEPARATOR):
            token = token.strip()
            if token.lower() in _NO_UNAVAILABLE_TOKENS:
                continue
            mode = parse_mode_token(token)
            if mode is None:
                raise BadMode(row_number, schema["unavailable_modes"], token)
            unavailable.add(mode)
        if len(unavailable) >= len(MODES):
            raise AllModesUnavailable(row_number)

        flags: set[str] = set()
        if usual in unavailable:
            # Contradictory answer: they do use it, so treat it as available.
            unavailable.discard(usual)
            flags.add(FLAG_USUAL_MARKED_UNAVAILABLE)
        if distance > DISTANCE_OUTLIER_KM:
            flags.add(FLAG_DISTANCE_OUTLIER)
        if trips > TRIPS_OUTLIER_PER_WEEK:
            flags.add(FLAG_TRIPS_OUTLIER)

        priorities_raw = {
            c: _parse_rating(
                cell(f"prio_{c.value.lower()}"),
                row_number,
                schema[f"prio_{c.value.lower()}"],
            )
            for c in CRITERIA
        }
        if all(v == 0 for v in priorities_raw.values()):
            raise DegeneratePriorities(
                f"row {row_number}: all six priorities are zero; scores are undefined"
            )
        evaluations_raw = {
            m: {
                c: _parse_rating(
                    cell(f"eval_{m.value.lower()}_{c.value.lower()}"),
                    row_number,
                    schema[f"eval_{m.value.lower()}_{c.value.lower()}"],
                )
                for c in CRITERIA
            }
            for m in MODES
        }

        rid = cell("id").strip() if "id" in col_index else ""
        if not rid:
            rid = f"row-{row_number}"

        respondents.append(
            Respondent(
                id=rid,
                gender=gender,
                usual_mode=usual,
                distance_km=distance,
                trips_per_week=trips,
                unavailable=frozenset(unavailable),
                priorities=PriorityProfile.from_mapping(priorities_raw),
                evaluations=EvaluationMatrix.from_mapping(evaluations_raw),
                outlier_flags=frozenset(flags),
            )
        )

    return Population(
        respondents=tuple(respondents),
        provenance=SurveyProvenance(source=source, row_count=len(respondents)),
    )


def _as_text(data: Union[bytes, str, IO[str], IO[bytes]]) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    if isinstance(data, str):
        return data.lstrip("﻿")
    raw = data.read()
    if isinstance(raw, bytes):
        return raw.decode("utf-8-sig")
    return raw.lstrip("﻿")


# ---------------------------------------------------------------------------
# Canonical JSON snapshot
# ---------------------------------------------------------------------------


def population_to_document(pop: Population) -> dict:
    """Build the canonical JSON-ready document (fixed field and enum order)."""
    if isinstance(pop.provenance, SurveyProvenance):
        provenance = {
            "kind": "survey",
            "source": pop.provenance.source,
            "row_count": pop.provenance.row_count,
        }
    else:
        provenance = {
            "kind": "synthetic",
            "seed": pop.provenance.seed,
            "config_digest": pop.provenance.config_digest,
        }
    return {
        "format_version": FORMAT_VERSION,
        "provenance": provenance,
        "respondents": [
            {
                "id": r.id,
                "gender": r.gender.value,
                "usual_mode": r.usual_mode.value,
                "distance_km": r.distance_km,
                "trips_per_week": r.trips_per_week,
                "unavailable": [m.value for m in MODES if m in r.unavailable],
                "priorities": {c.value: _json_rating(r.priorities[c]) for c in CRITERIA},
                "evaluations": {
                    m.value: {c.value: _json_rating(r.evaluations[m, c]) for c in CRITERIA}
                    for m in MODES
                },
                "outlier_flags": sorted(r.outlier_flags),
            }
            for r in pop.respondents
        ],
    }


def _json_rating(value: float) -> Union[int, float]:
    return int(value) if float(value).is_integer() else float(value)


def write_canonical_json(pop: Population) -> bytes:
    return json.dumps(
        population_to_document(pop), ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


def read_canonical_json(data: Union[bytes, str]) -> Population:
    """Parse a canonical JSON snapshot, re-validating every invariant."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    return population_from_document(doc)


def population_from_document(doc: object) -> Population:
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise MalformedDocument(
            f"unsupported format_version {doc.get('format_version')!r}"
        )
    prov_doc = doc.get("provenance")
    if not isinstance(prov_doc, dict) or "kind" not in prov_doc:
        raise MalformedDocument("missing provenance")
    if prov_doc["kind"] == "survey":
        provenance: object = SurveyProvenance(
            source=str(prov_doc.get("source", "")),
            row_count=int(prov_doc.get("row_count", 0)),
        )
    elif prov_doc["kind"] == "synthetic":
        provenance = SyntheticProvenance(
            seed=int(prov_doc.get("seed", 0)),
            config_digest=str(prov_doc.get("config_digest", "")),
        )
    else:
        raise MalformedDocument(f"unknown provenance kind {prov_doc['kind']!r}")

    raw_respondents = doc.get("respondents")
    if not isinstance(raw_respondents, list):
        raise MalformedDocument("respondents must be a list")

    respondents = []
    for i, rdoc in enumerate(raw_respondents):
        try:
            respondents.append(_respondent_from_document(rdoc))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"respondent #{i}: {exc}") from None
    try:
        return Population(respondents=tuple(respondents), provenance=provenance)
    except ValueError as exc:
        raise MalformedDocument(str(exc)) from None


def _respondent_from_document(rdoc: dict) -> Respondent:
    gender = Gender(rdoc["gender"])
    usual = Mode(rdoc["usual_mode"])
    unavailable = frozenset(Mode(m) for m in rdoc["unavailable"])
    priorities = {}
    for c in CRITERIA:
        v = rdoc["priorities"][c.value]
        if not is_valid_rating(v):
            raise ValueError(f"priority {c.value}={v!r} is not a rating")
        priorities[c] = v
    evaluations = {}
    for m in MODES:
        evaluations[m] = {}
        for c in CRITERIA:
            v = rdoc["evaluations"][m.value][c.value]
            if not is_valid_rating(v):
                raise ValueError(f"evaluation {m.value}/{c.value}={v!r} is not a rating")
            evaluations[m][c] = v
    return Respondent(
        id=str(rdoc["id"]),
        gender=gender,
        usual_mode=usual,
        distance_km=float(rdoc["distance_km"]),
        trips_per_week=float(rdoc["trips_per_week"]),
        unavailable=unavailable,
        priorities=PriorityProfile.from_mapping(priorities),
        evaluations=EvaluationMatrix.from_mapping(evaluations),
        outlier_flags=frozenset(str(f) for f in rdoc.get("outlier_flags", [])),
    )
