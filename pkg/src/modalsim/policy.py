"""What-if policy simulator.

A scenario pins selected (mode, criterion) evaluation cells to new values
for the whole population, as a stylized policy intervention.  Running a
scenario recomputes everyone's best mode under a configurable stack of
cognitive distortions and reports the modal shift: splits before and
after, a full mode-to-mode transfer matrix, a rationality readout, and an
emissions index.  A small game loop chains scenarios turn by turn.

Pipeline order is fixed: evaluation source (own ratings or crowd
medians), then scenario overrides, then the reactance penalty, then the
halo mask.  Distortions key on each respondent's usual mode, which never
changes during a game; only the currently chosen mode evolves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .biases import (
    DEFAULT_HALO_COMPARISON,
    HaloComparison,
    ReactanceParams,
    ReactanceScope,
    crowd_medians,
    halo_mask_matrix,
    reactance_tensor,
)
from .decision import (
    TIE_TOLERANCE,
    Crowd,
    EvalSource,
    Overlay,
    SelfEvals,
    classification_codes,
    effective_tensor,
    eval_source_label,
    report_from_codes,
)
from .errors import BadConfig, BadSplit, EmptyGroup, LengthMismatch
from .model import (
    CRITERIA,
    CRITERION_INDEX,
    MODE_INDEX,
    MODES,
    Criterion,
    Mode,
    Population,
)

__all__ = [
    "EMISSION_WEIGHTS",
    "SPLIT_TOLERANCE",
    "BiasConfig",
    "GameState",
    "PolicyScenario",
    "ScenarioResult",
    "advance_turn",
    "builtin_scenarios",
    "emissions_index",
    "new_game",
    "promoted_cells",
    "run_scenario",
    "transfer_matrix",
]


SPLIT_TOLERANCE = 1e-9

# Relative CO2-equivalent weight of one trip by each mode.
EMISSION_WEIGHTS: dict[Mode, float] = {
    Mode.BICYCLE: 0.0,
    Mode.CAR: 1.0,
    Mode.BUS: 0.3,
    Mode.WALK: 0.0,
}


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolicyScenario:
    """A named set of evaluation overrides, at most one per cell."""

    name: str
    overrides: frozenset[tuple[Mode, Criterion, float]] = frozenset()

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name.strip():
            raise BadConfig("scenario name must be a non-empty string")
        object.__setattr__(self, "overrides", frozenset(self.overrides))
        # reuse the override validation (duplicates, value range)
        Overlay(SelfEvals(), self.overrides)

    def sorted_overrides(self) -> list[tuple[Mode, Criterion, float]]:
        return sorted(
            self.overrides,
            key=lambda o: (MODE_INDEX[o[0]], CRITERION_INDEX[o[1]]),
        )

    def as_document(self) -> dict:
        return {
            "name": self.name,
            "overrides": [
                {"mode": m.value, "criterion": c.value, "value": v}
                for m, c, v in self.sorted_overrides()
            ],
        }

    @classmethod
    def from_document(cls, doc: object) -> "PolicyScenario":
        if not isinstance(doc, dict):
            raise BadConfig("scenario document must be a JSON object")
        if "name" not in doc:
            raise BadConfig("scenario document is missing 'name'")
        raw = doc.get("overrides", [])
        if not isinstance(raw, list):
            raise BadConfig("scenario overrides must be a list")
        modes = {m.value: m for m in MODES}
        criteria = {c.value: c for c in CRITERIA}
        overrides = set()
        for item in raw:
            if not isinstance(item, dict) or not {"mode", "criterion", "value"} <= set(item):
                raise BadConfig(
                    "each override needs 'mode', 'criterion' and 'value' fields"
                )
            if item["mode"] not in modes:
                raise BadConfig(f"unknown mode {item['mode']!r} in scenario override")
            if item["criterion"] not in criteria:
                raise BadConfig(
                    f"unknown criterion {item['criterion']!r} in scenario override"
                )
            overrides.add((modes[item["mode"]], criteria[item["criterion"]], item["value"]))
        return cls(name=doc["name"], overrides=frozenset(overrides))

    def to_json(self) -> str:
        return json.dumps(self.as_document(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "PolicyScenario":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadConfig(f"scenario document is not valid JSON: {exc}") from exc
        return cls.from_document(doc)


def builtin_scenarios() -> tuple[PolicyScenario, ...]:
    """The three ready-made interventions, in a stable order."""
    return (
        PolicyScenario(
            "Free public transport",
            frozenset({(Mode.BUS, Criterion.FINANCE, 10)}),
        ),
        PolicyScenario(
            "Safe cycling lanes",
            frozenset({(Mode.BICYCLE, Criterion.SAFETY, 10)}),
        ),
        PolicyScenario(
            "15-minute city",
            frozenset({(Mode.WALK, Criterion.TIME, 10)}),
        ),
    )


def promoted_cells(
    scenario: PolicyScenario, pop: Population
) -> frozenset[tuple[Mode, Criterion]]:
    """Cells whose override lies strictly above the population median."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    if not scenario.overrides:
        return frozenset()
    medians = crowd_medians(pop)
    return frozenset(
        (m, c) for m, c, v in scenario.overrides if v > medians[m, c]
    )


# ---------------------------------------------------------------------------
# Bias stack
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiasConfig:
    """Which distortions shape the population's choices.

    choice_supportive on means everyone trusts their own ratings; off
    means everyone is judged by the crowd's median ratings.
    """

    choice_supportive: bool = True
    halo: bool = False
    reactance: bool = False
    reactance_params: ReactanceParams = field(default_factory=ReactanceParams)
    halo_comparison: HaloComparison = DEFAULT_HALO_COMPARISON

    def as_document(self) -> dict:
        return {
            "choice_supportive": self.choice_supportive,
            "halo": self.halo,
            "halo_comparison": self.halo_comparison.value,
            "reactance": self.reactance,
            "reactance_delta": self.reactance_params.delta,
            "reactance_scope": self.reactance_params.scope.value,
        }

    @classmethod
    def from_document(cls, doc: object) -> "BiasConfig":
        if not isinstance(doc, dict):
            raise BadConfig("bias config must be a JSON object")
        known = {
            "choice_supportive",
            "halo",
            "halo_comparison",
            "reactance",
            "reactance_delta",
            "reactance_scope",
        }
        unknown = set(doc) - known
        if unknown:
            raise BadConfig(f"bias config has unknown keys: {sorted(unknown)!r}")
        for key in ("choice_supportive", "halo", "reactance"):
            if key in doc and not isinstance(doc[key], bool):
                raise BadConfig(f"bias config field {key!r} must be a boolean")
        try:
            comparison = HaloComparison(doc.get("halo_comparison", DEFAULT_HALO_COMPARISON.value))
        except ValueError as exc:
            raise BadConfig(f"unknown halo_comparison {doc.get('halo_comparison')!r}") from exc
        try:
            scope = ReactanceScope(
                doc.get("reactance_scope", ReactanceScope.PROMOTED_CRITERION_ONLY.value)
            )
        except ValueError as exc:
            raise BadConfig(f"unknown reactance_scope {doc.get('reactance_scope')!r}") from exc
        return cls(
            choice_supportive=doc.get("choice_supportive", True),
            halo=doc.get("halo", False),
            reactance=doc.get("reactance", False),
            reactance_params=ReactanceParams(
                delta=doc.get("reactance_delta", 1.0), scope=scope
            ),
            halo_comparison=comparison,
        )


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioResult:
    """Aggregate outcome of one scenario run.

    transfer[i][j] counts respondents who moved from mode i (their mode
    before the run) to mode j, indices in canonical mode order.  The
    rationality block classifies each respondent's before-mode under the
    scenario's effective evaluations.
    """

    scenario: str
    before_split: Mapping[Mode, float]
    after_split: Mapping[Mode, float]
    transfer: tuple[tuple[int, ...], ...]
    rationality: dict
    emissions_index: float
    metadata: dict

    def as_document(self) -> dict:
        return {
            "scenario": self.scenario,
            "before_split": {m.value: self.before_split[m] for m in MODES},
            "after_split": {m.value: self.after_split[m] for m in MODES},
            "transfer": [list(row) for row in self.transfer],
            "rationality": self.rationality,
            "emissions_index": self.emissions_index,
            "metadata": self.metadata,
        }


def _simulate(
    pop: Population,
    scenario: PolicyScenario,
    bias: BiasConfig,
    current: np.ndarray,
) -> tuple[ScenarioResult, np.ndarray]:
    """Run the pipeline; returns the aggregate result and per-respondent
    chosen mode indices."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    arrays = pop.arrays
    n = arrays.size
    rows = np.arange(n)

    medians = crowd_medians(pop)
    base_src: EvalSource = SelfEvals() if bias.choice_supportive else Crowd(medians)
    src: EvalSource = (
        Overlay(base_src, scenario.overrides) if scenario.overrides else base_src
    )
    tensor = effective_tensor(arrays, src)

    promoted = frozenset(
        (m, c) for m, c, v in scenario.overrides if v > medians[m, c]
    )
    if bias.reactance and promoted:
        tensor = reactance_tensor(tensor, arrays.usual, promoted, bias.reactance_params)

    if bias.halo:
        mask = halo_mask_matrix(arrays, tensor, bias.halo_comparison)
        weights = arrays.priorities * ~mask
        mask_field: object = "halo"
    else:
        weights = arrays.priorities
        mask_field = []

    denominators = weights.sum(axis=1)
    valid = denominators > 0
    safe = np.where(valid, denominators, 1.0)
    scores = np.einsum("nmc,nc->nm", tensor, weights) / safe[:, None]

    available_scores = np.where(arrays.available, scores, -np.inf)
    top = available_scores.max(axis=1)
    in_best = (scores >= (top - TIE_TOLERANCE)[:, None]) & arrays.available
    keep = in_best[rows, current]
    first_best = np.argmax(in_best, axis=1)
    choice = np.where(keep, current, first_best)
    # a respondent whose every unmasked criterion has zero priority has no
    # defined score; they sit the turn out and are listed in the metadata
    choice = np.where(valid, choice, current)

    transfer_counts = np.bincount(current * len(MODES) + choice, minlength=16)
    transfer = tuple(
        tuple(int(v) for v in row)
        for row in transfer_counts.reshape(len(MODES), len(MODES))
    )
    before = {
        m: float(np.mean(current == i)) for i, m in enumerate(MODES)
    }
    after = {m: float(np.mean(choice == i)) for i, m in enumerate(MODES)}

    codes = classification_codes(
        scores[valid], arrays.available[valid], current[valid]
    )
    rationality = report_from_codes(
        codes, current[valid], eval_source_label(src), mask_field
    )

    metadata = {
        "eval_source": eval_source_label(src),
        "bias": bias.as_document(),
        "overrides": scenario.as_document()["overrides"],
        "promoted": [
            [m.value, c.value]
            for m, c in sorted(
                promoted, key=lambda mc: (MODE_INDEX[mc[0]], CRITERION_INDEX[mc[1]])
            )
        ],
        "skipped": [pop[i].id for i in np.flatnonzero(~valid)],
    }
    result = ScenarioResult(
        scenario=scenario.name,
        before_split=before,
        after_split=after,
        transfer=transfer,
        rationality=rationality,
        emissions_index=emissions_index(after),
        metadata=metadata,
    )
    return result, choice


def run_scenario(
    pop: Population,
    scenario: PolicyScenario,
    bias: BiasConfig = BiasConfig(),
) -> ScenarioResult:
    """Run one scenario against a fresh population (everyone on their
    usual mode)."""
    if len(pop) == 0:
        raise EmptyGroup("population is empty")
    result, _ = _simulate(pop, scenario, bias, pop.arrays.usual)
    return result


# ---------------------------------------------------------------------------
# Aggregates
# ---------------------------------------------------------------------------


def transfer_matrix(
    before: Sequence[Mode], after: Sequence[Mode]
) -> tuple[tuple[int, ...], ...]:
    """4x4 movement counts between two mode assignments."""
    if len(before) != len(after):
        raise LengthMismatch(
            f"before has {len(before)} entries, after has {len(after)}"
        )
    counts = [[0] * len(MODES) for _ in MODES]
    for b, a in zip(before, after):
        counts[MODE_INDEX[b]][MODE_INDEX[a]] += 1
    return tuple(tuple(row) for row in counts)


def emissions_index(split: Mapping[Mode, float]) -> float:
    """Weighted emissions level of a modal split (car-trip equivalents)."""
    total = 0.0
    acc = 0.0
    for mode in MODES:
        if mode not in split:
            raise BadSplit(f"split is missing {mode.value}")
        value = float(split[mode])
        if not (np.isfinite(value) and value >= 0.0):
            raise BadSplit(f"split[{mode.value}] must be a fraction, got {value!r}")
        acc += value
        total += value * EMISSION_WEIGHTS[mode]
    if abs(acc - 1.0) > SPLIT_TOLERANCE:
        raise BadSplit(f"split fractions must sum to 1, got {acc!r}")
    return total


# ---------------------------------------------------------------------------
# Game loop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    """One position in a what-if game: who is currently riding what."""

    population: Population
    current: tuple[Mode, ...]
    turn: int = 0
    history: tuple[tuple[PolicyScenario, ScenarioResult], ...] = ()

    def __post_init__(self) -> None:
        if len(self.current) != len(self.population):
            raise LengthMismatch(
                f"current modes cover {len(self.current)} respondents, "
                f"population has {len(self.population)}"
            )
        for r, mode in zip(self.population, self.current):
            if mode in r.unavailable:
                raise BadConfig(
                    f"respondent {r.id!r} cannot currently use {mode.value}"
                )

    def current_split(self) -> dict[Mode, float]:
        n = len(self.current)
        if n == 0:
            raise EmptyGroup("population is empty")
        return {
            m: sum(1 for x in self.current if x is m) / n for m in MODES
        }

    def as_document(self) -> dict:
        doc: dict = {"turn": self.turn, "population_size": len(self.population)}
        if len(self.population):
            doc["current_split"] = {
                m.value: v for m, v in self.current_split().items()
            }
            doc["emissions_index"] = emissions_index(self.current_split())
        doc["history"] = [
            {"scenario": scenario.as_document(), "result": result.as_document()}
            for scenario, result in self.history
        ]
        return doc


def new_game(pop: Population) -> GameState:
    """Initial state: everyone on their usual mode."""
    return GameState(
        population=pop,
        current=tuple(r.usual_mode for r in pop),
        turn=0,
        history=(),
    )


def advance_turn(
    state: GameState,
    scenario: PolicyScenario,
    bias: BiasConfig = BiasConfig(),
) -> GameState:
    """Play one scenario from the given state; returns the next state."""
    current_idx = np.fromiter(
        (MODE_INDEX[m] for m in state.current), dtype=np.int64, count=len(state.current)
    )
    result, choice = _simulate(state.population, scenario, bias, current_idx)
    return GameState(
        population=state.population,
        current=tuple(MODES[i] for i in choice.tolist()),
        turn=state.turn + 1,
        history=state.history + ((scenario, result),),
    )
