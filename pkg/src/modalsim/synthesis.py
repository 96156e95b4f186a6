"""Synthetic population generation from group-level rating statistics.

A :class:`SynthesisConfig` describes a population by its modal split, by
per-group mean priorities, by users/non-users mean evaluations, and by a
shared rating noise level.  :func:`synthesize` draws a deterministic
population from such a config.  Two ready-made profiles ship with the
package as data files and are loaded through :func:`default_config`.

Sampled ratings live on the integer 0..10 grid: each cell is drawn from a
normal distribution, rounded, then clipped.  Rounding and clipping shift
the mean of the result away from the normal's location parameter, so the
generator first calibrates the location numerically such that the mean of
the *gridded* value matches the configured mean.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Mapping

import numpy as np

from .errors import BadConfig
from .model import (
    CRITERIA,
    GENDERS,
    MODES,
    RATING_MAX,
    RATING_MIN,
    Criterion,
    EvaluationMatrix,
    Gender,
    Mode,
    Population,
    PriorityProfile,
    Respondent,
    SyntheticProvenance,
)

__all__ = [
    "FLAG_SYNTHETIC",
    "PROBABILITY_TOLERANCE",
    "SynthesisConfig",
    "SynthesisProfile",
    "default_config",
    "expected_grid_mean",
    "synthesize",
]

# Flag attached to every generated respondent: distance and trip counts are
# zero placeholders, not observations.
FLAG_SYNTHETIC = "synthetic"

PROBABILITY_TOLERANCE = 1e-9

_MEANS_KEYS = ("users", "nonusers")


class SynthesisProfile(Enum):
    """Built-in config profiles shipped as package data."""

    OUR_SAMPLE = "OurSample"
    FRANCE = "France"


_PROFILE_FILES = {
    SynthesisProfile.OUR_SAMPLE: "our_sample.json",
    SynthesisProfile.FRANCE: "france.json",
}

_PROFILE_ALIASES = {
    "oursample": SynthesisProfile.OUR_SAMPLE,
    "our-sample": SynthesisProfile.OUR_SAMPLE,
    "our_sample": SynthesisProfile.OUR_SAMPLE,
    "france": SynthesisProfile.FRANCE,
}


def _require_mode_map(mapping: Mapping[Mode, float], label: str) -> dict[Mode, float]:
    out: dict[Mode, float] = {}
    for mode in MODES:
        if mode not in mapping:
            raise BadConfig(f"{label} is missing an entry for {mode.value}")
        value = float(mapping[mode])
        if not math.isfinite(value):
            raise BadConfig(f"{label}[{mode.value}] must be finite")
        out[mode] = value
    extra = set(mapping) - set(MODES)
    if extra:
        raise BadConfig(f"{label} has unknown keys: {sorted(k for k in extra)!r}")
    return out


def _require_mean_table(
    table: Mapping[Mode, Mapping[Criterion, float]], label: str
) -> dict[Mode, dict[Criterion, float]]:
    out: dict[Mode, dict[Criterion, float]] = {}
    for mode in MODES:
        if mode not in table:
            raise BadConfig(f"{label} is missing a row for {mode.value}")
        row = table[mode]
        cells: dict[Criterion, float] = {}
        for criterion in CRITERIA:
            if criterion not in row:
                raise BadConfig(
                    f"{label}[{mode.value}] is missing {criterion.value}"
                )
            value = float(row[criterion])
            if not (
                math.isfinite(value) and RATING_MIN <= value <= RATING_MAX
            ):
                raise BadConfig(
                    f"{label}[{mode.value}][{criterion.value}] must lie in "
                    f"[{RATING_MIN}, {RATING_MAX}], got {value!r}"
                )
            cells[criterion] = value
        out[mode] = cells
    return out


@dataclass(frozen=True)
class SynthesisConfig:
    """Full recipe for one synthetic population.

    ``priority_means`` is keyed by the usual mode of the group; the two
    evaluation tables are keyed by the rated mode, applied depending on
    whether the respondent uses that mode.  All means refer to the rounded
    and clipped rating, not to the underlying normal.
    """

    n: int
    seed: int
    modal_distribution: Mapping[Mode, float]
    priority_means: Mapping[Mode, Mapping[Criterion, float]]
    user_evaluation_means: Mapping[Mode, Mapping[Criterion, float]]
    nonuser_evaluation_means: Mapping[Mode, Mapping[Criterion, float]]
    sigma: float = 1.8
    unavailability_prob: Mapping[Mode, float] | None = None
    gender_split: Mapping[Gender, float] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise BadConfig(f"n must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise BadConfig(f"seed must be a non-negative integer, got {self.seed!r}")

        dist = _require_mode_map(self.modal_distribution, "modal_distribution")
        if any(v < 0.0 for v in dist.values()):
            raise BadConfig("modal_distribution entries must be non-negative")
        if abs(sum(dist.values()) - 1.0) > PROBABILITY_TOLERANCE:
            raise BadConfig(
                f"modal_distribution must sum to 1, got {sum(dist.values())!r}"
            )
        object.__setattr__(self, "modal_distribution", dist)

        object.__setattr__(
            self,
            "priority_means",
            _require_mean_table(self.priority_means, "priority_means"),
        )
        object.__setattr__(
            self,
            "user_evaluation_means",
            _require_mean_table(self.user_evaluation_means, "evaluation_means[users]"),
        )
        object.__setattr__(
            self,
            "nonuser_evaluation_means",
            _require_mean_table(
                self.nonuser_evaluation_means, "evaluation_means[nonusers]"
            ),
        )

        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma > 0.0):
            raise BadConfig(f"sigma must be a positive real, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)

        unav = self.unavailability_prob
        if unav is None:
            unav = {Mode.BICYCLE: 0.08, Mode.CAR: 0.15, Mode.BUS: 0.10, Mode.WALK: 0.05}
        unav = _require_mode_map(unav, "unavailability_prob")
        if any(not 0.0 <= v <= 1.0 for v in unav.values()):
            raise BadConfig("unavailability_prob entries must lie in [0, 1]")
        object.__setattr__(self, "unavailability_prob", unav)

        split = self.gender_split
        if split is None:
            split = {Gender.WOMAN: 0.49, Gender.MAN: 0.51}
        cleaned: dict[Gender, float] = {}
        for gender in GENDERS:
            if gender not in split:
                continue
            value = float(split[gender])
            if not (math.isfinite(value) and value >= 0.0):
                raise BadConfig(f"gender_split[{gender.value}] must be non-negative")
            cleaned[gender] = value
        extra = set(split) - set(GENDERS)
        if extra:
            raise BadConfig(f"gender_split has unknown keys: {sorted(extra)!r}")
        if not cleaned:
            raise BadConfig("gender_split must name at least one gender")
        if abs(sum(cleaned.values()) - 1.0) > PROBABILITY_TOLERANCE:
            raise BadConfig(
                f"gender_split must sum to 1, got {sum(cleaned.values())!r}"
            )
        object.__setattr__(self, "gender_split", cleaned)

    def as_document(self) -> dict:
        """Plain-JSON form with canonical key order."""

        def mode_map(values: Mapping[Mode, float]) -> dict[str, float]:
            return {m.value: values[m] for m in MODES}

        def table(values: Mapping[Mode, Mapping[Criterion, float]]) -> dict:
            return {
                m.value: {c.value: values[m][c] for c in CRITERIA} for m in MODES
            }

        return {
            "n": self.n,
            "seed": self.seed,
            "modal_distribution": mode_map(self.modal_distribution),
            "priority_means": table(self.priority_means),
            "evaluation_means": {
                "users": table(self.user_evaluation_means),
                "nonusers": table(self.nonuser_evaluation_means),
            },
            "sigma": self.sigma,
            "unavailability_prob": mode_map(self.unavailability_prob),
            "gender_split": {
                g.value: self.gender_split[g] for g in GENDERS if g in self.gender_split
            },
        }

    @classmethod
    def from_document(cls, doc: object) -> "SynthesisConfig":
        if not isinstance(doc, dict):
            raise BadConfig("config document must be a JSON object")
        for key in ("n", "seed"):
            if key not in doc:
                raise BadConfig(f"config document is missing {key!r}")
        tables = _tables_from_document(doc)
        return cls(n=doc["n"], seed=doc["seed"], **tables)

    def digest(self) -> str:
        payload = json.dumps(self.as_document(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def provenance(self) -> SyntheticProvenance:
        return SyntheticProvenance(seed=self.seed, config_digest=self.digest())


def _tables_from_document(doc: dict) -> dict:
    """Shared parsing for config documents and profile data files."""

    def enum_keyed(mapping: object, enum_values, label: str) -> dict:
        if not isinstance(mapping, dict):
            raise BadConfig(f"{label} must be a JSON object")
        by_value = {e.value: e for e in enum_values}
        out = {}
        for key, value in mapping.items():
            if key not in by_value:
                raise BadConfig(f"{label} has unknown key {key!r}")
            out[by_value[key]] = value
        return out

    def table(mapping: object, label: str) -> dict:
        rows = enum_keyed(mapping, MODES, label)
        return {
            mode: enum_keyed(row, CRITERIA, f"{label}[{mode.value}]")
            for mode, row in rows.items()
        }

    for key in ("modal_distribution", "priority_means", "evaluation_means", "sigma"):
        if key not in doc:
            raise BadConfig(f"config document is missing {key!r}")
    means = doc["evaluation_means"]
    if not isinstance(means, dict) or set(means) != set(_MEANS_KEYS):
        raise BadConfig(
            "evaluation_means must be an object with 'users' and 'nonusers'"
        )
    out = {
        "modal_distribution": enum_keyed(
            doc["modal_distribution"], MODES, "modal_distribution"
        ),
        "priority_means": table(doc["priority_means"], "priority_means"),
        "user_evaluation_means": table(means["users"], "evaluation_means[users]"),
        "nonuser_evaluation_means": table(
            means["nonusers"], "evaluation_means[nonusers]"
        ),
        "sigma": doc["sigma"],
    }
    if "unavailability_prob" in doc:
        out["unavailability_prob"] = enum_keyed(
            doc["unavailability_prob"], MODES, "unavailability_prob"
        )
    if "gender_split" in doc:
        out["gender_split"] = enum_keyed(doc["gender_split"], GENDERS, "gender_split")
    return out


def default_config(
    profile: SynthesisProfile | str, n: int = 650, seed: int = 0
) -> SynthesisConfig:
    """Load one of the built-in profiles with the given size and seed."""
    if isinstance(profile, str):
        key = profile.strip().lower()
        if key not in _PROFILE_ALIASES:
            known = sorted(set(_PROFILE_ALIASES))
            raise BadConfig(f"unknown profile {profile!r}; expected one of {known}")
        profile = _PROFILE_ALIASES[key]
    path = resources.files(__package__).joinpath("profiles", _PROFILE_FILES[profile])
    doc = json.loads(path.read_text(encoding="utf-8"))
    tables = _tables_from_document(doc)
    return SynthesisConfig(n=n, seed=seed, **tables)


_SQRT2 = math.sqrt(2.0)


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


def expected_grid_mean(location: float, sigma: float) -> float:
    """Mean of ``clip(round(Normal(location, sigma)), 0, 10)``.

    The grid value equals k (for 0 < k < 10) when the normal falls in
    [k - 0.5, k + 0.5); the end bins absorb the tails.
    """
    if not sigma > 0.0:
        raise BadConfig(f"sigma must be positive, got {sigma!r}")
    total = 0.0
    for k in range(RATING_MIN + 1, RATING_MAX):
        upper = _normal_cdf((k + 0.5 - location) / sigma)
        lower = _normal_cdf((k - 0.5 - location) / sigma)
        total += k * (upper - lower)
    total += RATING_MAX * (1.0 - _normal_cdf((RATING_MAX - 0.5 - location) / sigma))
    return total


@lru_cache(maxsize=8192)
def _calibrated_location(target: float, sigma: float) -> float:
    """Invert :func:`expected_grid_mean` in its (strictly increasing) location.

    Targets of exactly 0 or 10 are unreachable limits; the search interval
    is wide enough that its ends are indistinguishable from them.
    """
    lo = RATING_MIN - 12.0 * sigma
    hi = RATING_MAX + 12.0 * sigma
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if expected_grid_mean(mid, sigma) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _location_matrix(
    table: Mapping[Mode, Mapping[Criterion, float]], sigma: float
) -> np.ndarray:
    return np.array(
        [[_calibrated_location(table[m][c], sigma) for c in CRITERIA] for m in MODES]
    )


def _draw_ratings(rng: np.random.Generator, locations: np.ndarray, sigma: float) -> np.ndarray:
    raw = rng.normal(locations, sigma)
    return np.clip(np.rint(raw), RATING_MIN, RATING_MAX).astype(np.int64)


def synthesize(config: SynthesisConfig) -> Population:
    """Draw a deterministic population from ``config``.

    Draw order is fixed (usual modes, genders, priorities, evaluations,
    unavailability) so equal configs produce identical populations.
    """
    n = config.n
    sigma = config.sigma
    rng = np.random.default_rng(config.seed)

    dist = np.array([config.modal_distribution[m] for m in MODES], dtype=float)
    dist = dist / dist.sum()
    usual = rng.choice(len(MODES), size=n, p=dist)

    listed_genders = [g for g in GENDERS if g in config.gender_split]
    weights = np.array([config.gender_split[g] for g in listed_genders], dtype=float)
    weights = weights / weights.sum()
    gender_local = rng.choice(len(listed_genders), size=n, p=weights)

    priority_loc = _location_matrix(config.priority_means, sigma)
    user_loc = _location_matrix(config.user_evaluation_means, sigma)
    nonuser_loc = _location_matrix(config.nonuser_evaluation_means, sigma)

    priorities = _draw_ratings(rng, priority_loc[usual], sigma)
    # All-zero profiles violate the domain invariants; redraw those rows.
    for _ in range(100):
        bad = np.flatnonzero((priorities == 0).all(axis=1)) if n else np.array([], int)
        if bad.size == 0:
            break
        priorities[bad] = _draw_ratings(rng, priority_loc[usual[bad]], sigma)
    else:
        raise BadConfig("priority means keep producing all-zero profiles")

    locations = np.broadcast_to(
        nonuser_loc, (n, len(MODES), len(CRITERIA))
    ).copy()
    if n:
        locations[np.arange(n), usual] = user_loc[usual]
    evaluations = _draw_ratings(rng, locations, sigma)

    unav_p = np.array([config.unavailability_prob[m] for m in MODES], dtype=float)
    unavailable = rng.random((n, len(MODES))) < unav_p
    if n:
        unavailable[np.arange(n), usual] = False

    usual_list = usual.tolist()
    gender_list = gender_local.tolist()
    priority_rows = priorities.tolist()
    evaluation_rows = evaluations.tolist()
    unavailable_rows = unavailable.tolist()
    flags = frozenset({FLAG_SYNTHETIC})

    respondents = tuple(
        Respondent(
            id=f"syn-{i}",
            gender=listed_genders[gender_list[i]],
            usual_mode=MODES[usual_list[i]],
            distance_km=0.0,
            trips_per_week=0.0,
            unavailable=frozenset(
                mode
                for mode, flag in zip(MODES, unavailable_rows[i])
                if flag
            ),
            priorities=PriorityProfile(tuple(priority_rows[i])),
            evaluations=EvaluationMatrix(tuple(map(tuple, evaluation_rows[i]))),
            outlier_flags=flags,
        )
        for i in range(n)
    )
    return Population(respondents=respondents, provenance=config.provenance())
