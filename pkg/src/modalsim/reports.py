"""File emitters for the descriptive reports: one CSV per table plus a
combined JSON document.

CSV cells are formatted to two decimals with a dot separator; groups with
no members produce blank cells, never zeros. JSON keeps full precision.
All writes are atomic (temp file + rename) and contain no timestamps.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .biases import crowd_medians, halo_rescue_table
from .decision import Crowd, EvalSource, SelfEvals
from .errors import EmptyGroup
from .model import CRITERIA, MODES, Criterion, Mode, Population
from .policy import ScenarioResult
from .stats import (
    GroupFilter,
    Membership,
    accessibility_stats,
    deviation_users_vs_nonusers,
    gender_report,
    mean_evaluations,
    mean_priorities,
    modal_split,
    pairwise_mode_deviation,
    score_stats,
)

# row/column labels mirror the printed tables, which spell the walking
# group out in full in the priority and rescue tables
_LONG_LABELS = {
    Mode.BICYCLE: "Bicycle",
    Mode.CAR: "Car",
    Mode.BUS: "Bus",
    Mode.WALK: "Walking",
}

TABLE1_FILENAME = "table1_priorities.csv"
TABLE3_FILENAME = "table3_scores.csv"
FIG1_FILENAME = "fig1_split.csv"
FIG3_FILENAME = "fig3_accessibility.csv"
FIG7_FILENAME = "fig7_deviations.csv"
FIG11_FILENAME = "fig11_deviations.csv"
TABLE4_FILENAME = "table4_halo_rescue.csv"
STATS_JSON_FILENAME = "stats.json"


def table2_filename(mode: Mode) -> str:
    return f"table2_{mode.value.lower()}.csv"


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.2f}"


def _csv_text(rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def atomic_write_bytes(path: Path, blob: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(blob)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _mode_counts(pop: Population) -> dict[Mode, int]:
    if len(pop) == 0:
        return {m: 0 for m in MODES}
    counts = np.bincount(pop.arrays.usual, minlength=len(MODES))
    return {m: int(counts[i]) for i, m in enumerate(MODES)}


def priorities_table_csv(pop: Population) -> str:
    """Mean priority per criterion: one column for everyone, one per
    usual-mode group, group sizes in the header."""
    counts = _mode_counts(pop)
    header = ["", f"all ({len(pop)})"] + [
        f"{_LONG_LABELS[m]} ({counts[m]})" for m in MODES
    ]
    columns: list[Optional[dict[Criterion, float]]] = [
        mean_priorities(pop) if len(pop) else None
    ]
    for m in MODES:
        columns.append(
            mean_priorities(pop, GroupFilter(usual_mode=m)) if counts[m] else None
        )
    rows: list[list[object]] = [header]
    for c in CRITERIA:
        rows.append(
            [c.value] + [_fmt(col[c] if col else None) for col in columns]
        )
    return _csv_text(rows)


def evaluations_table_csv(pop: Population, mode: Mode) -> str:
    """Mean evaluation of one mode per criterion: everyone, users, non-users."""
    columns: list[Optional[dict[Criterion, float]]] = []
    filters = (
        None,
        GroupFilter(users_of=(mode, Membership.USERS)),
        GroupFilter(users_of=(mode, Membership.NON_USERS)),
    )
    for f in filters:
        try:
            columns.append(
                mean_evaluations(pop, mode) if f is None
                else mean_evaluations(pop, mode, f)
            )
        except EmptyGroup:
            columns.append(None)
    rows: list[list[object]] = [[mode.value, "All", "Users", "Non-u"]]
    for c in CRITERIA:
        rows.append(
            [c.value] + [_fmt(col[c] if col else None) for col in columns]
        )
    return _csv_text(rows)


def scores_table_csv(pop: Population, src: EvalSource = SelfEvals()) -> str:
    """Score distribution per mode: mean, stdev, median, user and non-user
    means."""
    rows: list[list[object]] = [
        ["Mode", "Mean mark", "Stdev", "Median", "Users", "Non-users"]
    ]
    try:
        stats = score_stats(pop, src=src)
    except EmptyGroup:
        stats = None
    for m in MODES:
        if stats is None:
            rows.append([m.value, "", "", "", "", ""])
            continue
        entry = stats[m]
        rows.append(
            [
                m.value,
                _fmt(entry.get("mean")),
                _fmt(entry.get("stdev")),
                _fmt(entry.get("median")),
                _fmt(entry.get("users_mean")),
                _fmt(entry.get("nonusers_mean")),
            ]
        )
    return _csv_text(rows)


def split_csv(pop: Population) -> str:
    """Usual-mode shares as counts and percentages."""
    counts = _mode_counts(pop)
    try:
        split = modal_split(pop)
    except EmptyGroup:
        split = None
    rows: list[list[object]] = [["Mode", "Count", "Percent"]]
    for m in MODES:
        rows.append(
            [m.value, counts[m], _fmt(split[m] * 100 if split else None)]
        )
    return _csv_text(rows)


def accessibility_csv(pop: Population) -> str:
    """Respondents lacking access to each mode."""
    per_mode = accessibility_stats(pop)["per_mode"]
    rows: list[list[object]] = [["Mode", "Without access"]]
    for m in MODES:
        rows.append([m.value, per_mode[m.value]])
    return _csv_text(rows)


def users_gap_csv(pop: Population) -> str:
    """Users' minus non-users' mean evaluation, per criterion and mode."""
    try:
        gaps: Optional[dict] = deviation_users_vs_nonusers(pop)
    except EmptyGroup:
        gaps = None
    rows: list[list[object]] = [["Criterion"] + [m.value for m in MODES]]
    for c in CRITERIA:
        rows.append(
            [c.value] + [_fmt(gaps[m][c] if gaps else None) for m in MODES]
        )
    return _csv_text(rows)


def observer_deviation_csv(
    pop: Population, criterion: Optional[Criterion] = None
) -> str:
    """Each usual-mode group's mean rating of every mode, relative to the
    whole-population mean for that mode."""
    try:
        table: Optional[dict] = pairwise_mode_deviation(pop, criterion)
    except EmptyGroup:
        table = None
    rows: list[list[object]] = [["Observer"] + [m.value for m in MODES]]
    for observer in MODES:
        rows.append(
            [observer.value]
            + [_fmt(table[observer][t] if table else None) for t in MODES]
        )
    return _csv_text(rows)


def rationality_csv(report: dict) -> str:
    """Tabulate a rationality report: share of rational, irrational and
    constrained choices per usual-mode group."""
    rows: list[list[object]] = [
        ["Mode", "Count", "Rational %", "Irrational %", "Constrained %"]
    ]
    by_mode = report["by_mode"]
    for m in MODES:
        entry = by_mode[m.value]
        rows.append(
            [
                m.value,
                entry["count"],
                _fmt(entry.get("rational_pct")),
                _fmt(entry.get("irrational_pct")),
                _fmt(entry.get("constrained_pct")),
            ]
        )
    return _csv_text(rows)


def halo_rescue_csv(pop: Population) -> str:
    """Counts of irrational decisions each single ignored criterion turns
    rational, by usual mode."""
    table = halo_rescue_table(pop)
    rows: list[list[object]] = [["Mode"] + [c.value for c in CRITERIA]]
    for m in MODES:
        rows.append([_LONG_LABELS[m]] + [table[m][c] for c in CRITERIA])
    return _csv_text(rows)


def transfer_csv(result: ScenarioResult) -> str:
    """Mode-change counts for one scenario run: rows are the mode held
    before, columns the mode chosen after."""
    rows: list[list[object]] = [["From/To"] + [m.value for m in MODES]]
    for i, m in enumerate(MODES):
        rows.append([m.value] + list(result.transfer[i]))
    return _csv_text(rows)


def priorities_section(pop: Population) -> dict:
    """Mean priorities for everyone and per usual-mode group, full precision."""
    counts = _mode_counts(pop)
    section: dict = {
        "all": {c.value: v for c, v in mean_priorities(pop).items()},
        "by_usual_mode": {},
    }
    for m in MODES:
        if counts[m]:
            group = mean_priorities(pop, GroupFilter(usual_mode=m))
            section["by_usual_mode"][m.value] = {
                c.value: v for c, v in group.items()
            }
    return section


def evaluations_section(pop: Population) -> dict:
    """Mean evaluations per mode over everyone, its users, its non-users."""
    section: dict = {}
    for m in MODES:
        entry: dict = {
            "all": {c.value: v for c, v in mean_evaluations(pop, m).items()}
        }
        for key, membership in (
            ("users", Membership.USERS),
            ("nonusers", Membership.NON_USERS),
        ):
            try:
                group = mean_evaluations(
                    pop, m, GroupFilter(users_of=(m, membership))
                )
            except EmptyGroup:
                continue
            entry[key] = {c.value: v for c, v in group.items()}
        section[m.value] = entry
    return section


def scores_section(pop: Population) -> dict:
    """Score distribution per mode keyed by mode name."""
    return {m.value: entry for m, entry in score_stats(pop).items()}


def split_section(pop: Population) -> dict:
    return {m.value: v for m, v in modal_split(pop).items()}


def deviations_section(pop: Population) -> dict:
    """Users-vs-non-users gaps plus observer-group deviations; sub-sections
    that are undefined for this population are omitted."""
    section: dict = {}
    try:
        gaps = deviation_users_vs_nonusers(pop)
        section["users_vs_nonusers"] = {
            m.value: {c.value: v for c, v in row.items()}
            for m, row in gaps.items()
        }
    except EmptyGroup:
        pass
    try:
        overall = pairwise_mode_deviation(pop)
        section["observer"] = {
            "overall": {
                o.value: {t.value: v for t, v in row.items()}
                for o, row in overall.items()
            },
            "by_criterion": {
                c.value: {
                    o.value: {t.value: v for t, v in row.items()}
                    for o, row in pairwise_mode_deviation(pop, c).items()
                }
                for c in CRITERIA
            },
        }
    except EmptyGroup:
        pass
    return section


def stats_json_document(pop: Population) -> dict:
    """Full-precision JSON body covering every report section that is
    defined for this population; undefined sections are omitted."""
    doc: dict = {"count": len(pop)}
    counts = _mode_counts(pop)
    doc["mode_counts"] = {m.value: counts[m] for m in MODES}
    if len(pop):
        doc["modal_split"] = split_section(pop)
        doc["priorities"] = priorities_section(pop)
        doc["evaluations"] = evaluations_section(pop)
        doc["scores"] = scores_section(pop)
    doc["accessibility"] = accessibility_stats(pop)
    deviations = deviations_section(pop)
    if "users_vs_nonusers" in deviations:
        doc["users_vs_nonusers_gap"] = deviations["users_vs_nonusers"]
    if "observer" in deviations:
        doc["observer_deviation"] = deviations["observer"]
    try:
        doc["gender"] = gender_report(pop)
    except EmptyGroup:
        pass
    if len(pop):
        medians = crowd_medians(pop)
        doc["crowd_medians"] = {
            m.value: {c.value: medians[m, c] for c in CRITERIA} for m in MODES
        }
    return doc


def write_stats_reports(pop: Population, out_dir: Path) -> list[Path]:
    """Emit every descriptive CSV plus the JSON document into out_dir;
    returns the written paths."""
    out_dir = Path(out_dir)
    artifacts: list[tuple[str, str]] = [
        (TABLE1_FILENAME, priorities_table_csv(pop)),
        (TABLE3_FILENAME, scores_table_csv(pop)),
        (FIG1_FILENAME, split_csv(pop)),
        (FIG3_FILENAME, accessibility_csv(pop)),
        (FIG7_FILENAME, users_gap_csv(pop)),
        (FIG11_FILENAME, observer_deviation_csv(pop)),
    ]
    for m in MODES:
        artifacts.append((table2_filename(m), evaluations_table_csv(pop, m)))
    artifacts.append(
        (
            STATS_JSON_FILENAME,
            json.dumps(stats_json_document(pop), indent=2, sort_keys=True) + "\n",
        )
    )
    written = []
    for name, text in artifacts:
        path = out_dir / name
        atomic_write_text(path, text)
        written.append(path)
    return sorted(written)


def crowd_source(pop: Population) -> Crowd:
    """Evaluation source that replaces private ratings with the population's
    per-cell medians."""
    return Crowd(crowd_medians(pop))
