"""HTTP service exposing populations, descriptive reports, rationality
analyses, and the policy game loop.

State lives in an in-memory session store keyed by opaque random ids.
Populations are immutable once stored; games advance only through their
turn route, serialized per game id. Mutating POST routes honor an
Idempotency-Key header: a retry with the same key replays the recorded
response instead of repeating the action.
"""

from __future__ import annotations

import json
import secrets
import threading
from typing import Optional

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse

from .biases import halo_rationality_report, halo_rescue_table
from .decision import rationality_report
from .decision import SelfEvals
from .errors import EmptyGroup, ModalSimError
from .model import CRITERIA, MODES, Population
from .policy import (
    BiasConfig,
    GameState,
    PolicyScenario,
    advance_turn,
    builtin_scenarios,
    new_game,
    run_scenario,
)
from .reports import (
    crowd_source,
    deviations_section,
    evaluations_section,
    priorities_section,
    scores_section,
    split_section,
)
from .stats import accessibility_stats, gender_report
from .survey import parse_survey_csv, population_to_document
from .synthesis import SynthesisConfig, default_config, synthesize

MAX_UPLOAD_BYTES = 50 * 1024 * 1024
MAX_SYNTH_RESPONDENTS = 1_000_000

_SCENARIO_ALIASES = {
    "free-pt": 0,
    "safe-lanes": 1,
    "city-15": 2,
}


class SessionStore:
    """Maps opaque ids to populations and game states."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._populations: dict[str, Population] = {}
        self._games: dict[str, GameState] = {}
        self._game_population: dict[str, str] = {}
        self._game_locks: dict[str, threading.Lock] = {}
        self._replays: dict[tuple[str, str], tuple[int, dict]] = {}

    @staticmethod
    def new_id() -> str:
        return secrets.token_hex(8)

    def put_population(self, pop: Population) -> str:
        with self._lock:
            population_id = self.new_id()
            self._populations[population_id] = pop
            return population_id

    def population(self, population_id: str) -> Population:
        with self._lock:
            pop = self._populations.get(population_id)
        if pop is None:
            raise HTTPException(404, f"unknown population {population_id!r}")
        return pop

    def delete_population(self, population_id: str) -> None:
        with self._lock:
            if population_id not in self._populations:
                raise HTTPException(404, f"unknown population {population_id!r}")
            holders = [
                g for g, p in self._game_population.items() if p == population_id
            ]
            if holders:
                raise HTTPException(
                    409,
                    f"population {population_id!r} is referenced by "
                    f"{len(holders)} live game(s)",
                )
            del self._populations[population_id]

    def put_game(self, population_id: str, state: GameState) -> str:
        with self._lock:
            if population_id not in self._populations:
                raise HTTPException(404, f"unknown population {population_id!r}")
            game_id = self.new_id()
            self._games[game_id] = state
            self._game_population[game_id] = population_id
            self._game_locks[game_id] = threading.Lock()
            return game_id

    def game(self, game_id: str) -> tuple[GameState, str]:
        with self._lock:
            state = self._games.get(game_id)
            if state is None:
                raise HTTPException(404, f"unknown game {game_id!r}")
            return state, self._game_population[game_id]

    def game_lock(self, game_id: str) -> threading.Lock:
        with self._lock:
            lock = self._game_locks.get(game_id)
        if lock is None:
            raise HTTPException(404, f"unknown game {game_id!r}")
        return lock

    def set_game(self, game_id: str, state: GameState) -> None:
        with self._lock:
            if game_id not in self._games:
                raise HTTPException(404, f"unknown game {game_id!r}")
            self._games[game_id] = state

    def delete_game(self, game_id: str) -> None:
        with self._lock:
            if game_id not in self._games:
                raise HTTPException(404, f"unknown game {game_id!r}")
            del self._games[game_id]
            del self._game_population[game_id]
            del self._game_locks[game_id]

    def replay(self, scope: str, key: Optional[str]) -> Optional[tuple[int, dict]]:
        if key is None:
            return None
        with self._lock:
            return self._replays.get((scope, key))

    def record(self, scope: str, key: Optional[str], status: int, body: dict) -> None:
        if key is None:
            return
        with self._lock:
            self._replays[(scope, key)] = (status, body)


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    if len(raw) > MAX_UPLOAD_BYTES:
        raise HTTPException(413, "request body exceeds the 50 MB limit")
    try:
        body = json.loads(raw) if raw else {}
    except json.JSONDecodeError as exc:
        raise HTTPException(400, f"request body is not valid JSON: {exc}")
    if not isinstance(body, dict):
        raise HTTPException(400, "request body must be a JSON object")
    return body


def _build_population(body: dict) -> Population:
    source = body.get("source")
    if source == "upload":
        csv_text = body.get("csv")
        if not isinstance(csv_text, str):
            raise HTTPException(400, "upload requires a 'csv' string field")
        schema = body.get("schema_map")
        if schema is not None and not (
            isinstance(schema, dict)
            and all(
                isinstance(k, str) and isinstance(v, str)
                for k, v in schema.items()
            )
        ):
            raise HTTPException(400, "'schema_map' must map strings to strings")
        return parse_survey_csv(csv_text, schema_map=schema, source="upload")
    if source == "synth":
        config_doc = body.get("config")
        if not isinstance(config_doc, dict):
            raise HTTPException(400, "synth requires a 'config' object field")
        if "profile" in config_doc:
            extras = set(config_doc) - {"profile", "n", "seed"}
            if extras:
                raise HTTPException(
                    400, f"unknown profile-config fields {sorted(extras)}"
                )
            config = default_config(
                config_doc["profile"],
                n=config_doc.get("n", 650),
                seed=config_doc.get("seed", 0),
            )
        else:
            config = SynthesisConfig.from_document(config_doc)
        if config.n > MAX_SYNTH_RESPONDENTS:
            raise HTTPException(
                400,
                f"synthesis capped at {MAX_SYNTH_RESPONDENTS} respondents",
            )
        return synthesize(config)
    raise HTTPException(400, "field 'source' must be 'upload' or 'synth'")


def _population_summary(pop: Population) -> dict:
    summary: dict = {
        "count": len(pop),
        "provenance": population_to_document(pop)["provenance"],
    }
    if len(pop):
        summary["modal_split"] = split_section(pop)
    return summary


def _resolve_scenario(raw: object) -> PolicyScenario:
    if isinstance(raw, str):
        if raw in _SCENARIO_ALIASES:
            return builtin_scenarios()[_SCENARIO_ALIASES[raw]]
        for scenario in builtin_scenarios():
            if scenario.name == raw:
                return scenario
        raise HTTPException(422, f"unknown builtin scenario {raw!r}")
    if isinstance(raw, dict):
        return PolicyScenario.from_document(raw)
    raise HTTPException(422, "field 'scenario' must be a name or an object")


def _resolve_bias(raw: object) -> BiasConfig:
    if raw is None:
        return BiasConfig()
    if not isinstance(raw, dict):
        raise HTTPException(422, "field 'bias_config' must be an object")
    return BiasConfig.from_document(raw)


def create_app(cors: bool = False) -> FastAPI:
    app = FastAPI(title="modalsim", version="0.1.0")
    if cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(ModalSimError)
    async def _domain_error(request: Request, exc: ModalSimError):
        status = 400 if request.url.path == "/populations" else 422
        return JSONResponse(
            status_code=status,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.post("/populations", status_code=201)
    async def create_population(
        request: Request,
        idempotency_key: Optional[str] = Header(None, alias="Idempotency-Key"),
    ):
        cached = store.replay("populations", idempotency_key)
        if cached is not None:
            return JSONResponse(status_code=cached[0], content=cached[1])
        body = await _json_body(request)
        pop = _build_population(body)
        population_id = store.put_population(pop)
        payload = {
            "population_id": population_id,
            "summary": _population_summary(pop),
        }
        store.record("populations", idempotency_key, 201, payload)
        return JSONResponse(status_code=201, content=payload)

    @app.delete("/populations/{population_id}", status_code=204)
    async def delete_population(population_id: str):
        store.delete_population(population_id)

    @app.get("/populations/{population_id}/stats/{report}")
    async def population_stats(population_id: str, report: str):
        pop = store.population(population_id)
        builders = {
            "table1": priorities_section,
            "table2": evaluations_section,
            "table3": scores_section,
            "split": split_section,
            "accessibility": accessibility_stats,
            "gender": gender_report,
            "deviations": deviations_section,
        }
        builder = builders.get(report)
        if builder is None:
            raise HTTPException(
                404, f"unknown report {report!r}; one of {sorted(builders)}"
            )
        try:
            return builder(pop)
        except EmptyGroup as exc:
            raise HTTPException(422, f"EmptyGroup: {exc}")

    @app.get("/populations/{population_id}/rationality")
    async def population_rationality(
        population_id: str, evals: str = "self", halo: str = "off"
    ):
        if evals not in ("self", "crowd"):
            raise HTTPException(422, "query 'evals' must be self or crowd")
        if halo not in ("on", "off"):
            raise HTTPException(422, "query 'halo' must be on or off")
        pop = store.population(population_id)
        try:
            src = SelfEvals() if evals == "self" else crowd_source(pop)
            if halo == "on":
                return halo_rationality_report(pop, src)
            return rationality_report(pop, src)
        except EmptyGroup as exc:
            raise HTTPException(422, f"EmptyGroup: {exc}")

    @app.get("/populations/{population_id}/halo-rescue")
    async def population_halo_rescue(population_id: str):
        pop = store.population(population_id)
        table = halo_rescue_table(pop)
        return {
            "by_mode": {
                m.value: {c.value: table[m][c] for c in CRITERIA} for m in MODES
            }
        }

    @app.post("/populations/{population_id}/scenarios")
    async def population_scenario(population_id: str, request: Request):
        pop = store.population(population_id)
        body = await _json_body(request)
        scenario = _resolve_scenario(body.get("scenario"))
        bias = _resolve_bias(body.get("bias_config"))
        try:
            return run_scenario(pop, scenario, bias).as_document()
        except EmptyGroup as exc:
            raise HTTPException(422, f"EmptyGroup: {exc}")

    @app.post("/games", status_code=201)
    async def create_game(
        request: Request,
        idempotency_key: Optional[str] = Header(None, alias="Idempotency-Key"),
    ):
        cached = store.replay("games", idempotency_key)
        if cached is not None:
            return JSONResponse(status_code=cached[0], content=cached[1])
        body = await _json_body(request)
        population_id = body.get("population_id")
        if not isinstance(population_id, str):
            raise HTTPException(400, "field 'population_id' is required")
        pop = store.population(population_id)
        game_id = store.put_game(population_id, new_game(pop))
        payload = {"game_id": game_id}
        store.record("games", idempotency_key, 201, payload)
        return JSONResponse(status_code=201, content=payload)

    @app.get("/games/{game_id}")
    async def game_state(game_id: str):
        state, population_id = store.game(game_id)
        return {
            "game_id": game_id,
            "population_id": population_id,
            **state.as_document(),
        }

    @app.post("/games/{game_id}/turns")
    async def play_turn(
        game_id: str,
        request: Request,
        idempotency_key: Optional[str] = Header(None, alias="Idempotency-Key"),
    ):
        body = await _json_body(request)
        scenario = _resolve_scenario(body.get("scenario"))
        bias = _resolve_bias(body.get("bias_config"))
        lock = store.game_lock(game_id)
        with lock:
            cached = store.replay(f"turns:{game_id}", idempotency_key)
            if cached is not None:
                return JSONResponse(status_code=cached[0], content=cached[1])
            state, _ = store.game(game_id)
            try:
                advanced = advance_turn(state, scenario, bias)
            except EmptyGroup as exc:
                raise HTTPException(422, f"EmptyGroup: {exc}")
            store.set_game(game_id, advanced)
            payload = {
                "turn": advanced.turn,
                "result": advanced.history[-1][1].as_document(),
            }
            store.record(f"turns:{game_id}", idempotency_key, 200, payload)
            return JSONResponse(status_code=200, content=payload)

    @app.delete("/games/{game_id}", status_code=204)
    async def delete_game(game_id: str):
        store.delete_game(game_id)

    return app
