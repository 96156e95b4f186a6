"""Tests for the HTTP service: routes, status codes, idempotency, and
response-schema conformance."""

import json
from importlib import resources

import jsonschema
import pytest
from fastapi.testclient import TestClient
from helpers import full_row, survey_csv

from modalsim.service import MAX_SYNTH_RESPONDENTS, create_app
from modalsim.synthesis import default_config


def load_schema(name: str) -> dict:
    text = (
        resources.files("modalsim")
        .joinpath(f"schemas/{name}.schema.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)


def check_schema(name: str, instance: object) -> None:
    jsonschema.validate(instance, load_schema(name))


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_synth_population(client, n=30, seed=1, profile="our-sample"):
    response = client.post(
        "/populations",
        json={"source": "synth", "config": {"profile": profile, "n": n, "seed": seed}},
    )
    assert response.status_code == 201, response.text
    return response.json()["population_id"]


class TestCreatePopulation:
    def test_synth_profile(self, client):
        response = client.post(
            "/populations",
            json={
                "source": "synth",
                "config": {"profile": "our-sample", "n": 30, "seed": 1},
            },
        )
        assert response.status_code == 201
        body = response.json()
        check_schema("population_created", body)
        assert body["summary"]["count"] == 30
        assert body["summary"]["provenance"]["kind"] == "synthetic"

    def test_synth_twice_gives_new_ids_same_summary(self, client):
        payload = {
            "source": "synth",
            "config": {"profile": "our-sample", "n": 1000, "seed": 42},
        }
        first = client.post("/populations", json=payload).json()
        second = client.post("/populations", json=payload).json()
        assert first["population_id"] != second["population_id"]
        assert first["summary"] == second["summary"]

    def test_synth_full_config_document(self, client):
        doc = default_config("our-sample", n=20, seed=9).as_document()
        response = client.post(
            "/populations", json={"source": "synth", "config": doc}
        )
        assert response.status_code == 201
        assert response.json()["summary"]["count"] == 20

    def test_synth_cap(self, client):
        doc = default_config("our-sample", n=MAX_SYNTH_RESPONDENTS + 1, seed=0)
        response = client.post(
            "/populations",
            json={"source": "synth", "config": doc.as_document()},
        )
        assert response.status_code == 400
        assert "capped" in response.json()["detail"]

    def test_synth_invalid_config(self, client):
        response = client.post(
            "/populations",
            json={"source": "synth", "config": {"profile": "mars", "n": 5}},
        )
        assert response.status_code == 400

    def test_upload_csv(self, client):
        blob = survey_csv([full_row(), full_row(usual_mode="Bus")]).decode()
        response = client.post(
            "/populations", json={"source": "upload", "csv": blob}
        )
        assert response.status_code == 201
        body = response.json()
        check_schema("population_created", body)
        assert body["summary"]["count"] == 2
        assert body["summary"]["provenance"]["kind"] == "survey"

    def test_upload_empty_csv(self, client):
        response = client.post(
            "/populations", json={"source": "upload", "csv": ""}
        )
        assert response.status_code == 400
        assert "MissingColumn" in response.json()["detail"]

    def test_upload_bad_row_reports_detail(self, client):
        blob = survey_csv([full_row(prio_ecology="11")]).decode()
        response = client.post(
            "/populations", json={"source": "upload", "csv": blob}
        )
        assert response.status_code == 400
        assert "row" in response.json()["detail"].lower()

    def test_upload_with_schema_map(self, client):
        blob = survey_csv([full_row()]).decode().replace("gender", "sex", 1)
        response = client.post(
            "/populations",
            json={
                "source": "upload",
                "csv": blob,
                "schema_map": {"gender": "sex"},
            },
        )
        assert response.status_code == 201

    def test_unknown_source(self, client):
        assert client.post(
            "/populations", json={"source": "divination"}
        ).status_code == 400

    def test_non_object_body(self, client):
        assert client.post("/populations", json=[1, 2]).status_code == 400

    def test_malformed_json_body(self, client):
        response = client.post(
            "/populations",
            content=b"{nope",
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code == 400

    def test_oversized_body(self, client):
        blob = b'{"source": "upload", "csv": "' + b"x" * (50 * 1024 * 1024) + b'"}'
        response = client.post(
            "/populations",
            content=blob,
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code == 413

    def test_idempotency_key_replays_response(self, client):
        payload = {
            "source": "synth",
            "config": {"profile": "our-sample", "n": 10, "seed": 3},
        }
        headers = {"Idempotency-Key": "retry-123"}
        first = client.post("/populations", json=payload, headers=headers)
        second = client.post("/populations", json=payload, headers=headers)
        assert first.status_code == second.status_code == 201
        assert first.json() == second.json()


class TestStatsRoutes:
    @pytest.mark.parametrize(
        "report,schema",
        [
            ("table1", "stats_table1"),
            ("table2", "stats_table2"),
            ("table3", "stats_table3"),
            ("split", "stats_split"),
            ("accessibility", "stats_accessibility"),
            ("gender", "stats_gender"),
            ("deviations", "stats_deviations"),
        ],
    )
    def test_reports_conform_to_schema(self, client, report, schema):
        pid = make_synth_population(client, n=60, seed=2)
        response = client.get(f"/populations/{pid}/stats/{report}")
        assert response.status_code == 200, response.text
        check_schema(schema, response.json())

    def test_unknown_report_name(self, client):
        pid = make_synth_population(client)
        assert client.get(f"/populations/{pid}/stats/table9").status_code == 404

    def test_unknown_population(self, client):
        assert client.get("/populations/nope/stats/split").status_code == 404

    def test_gender_undefined_is_422(self, client):
        blob = survey_csv([full_row(), full_row()]).decode()  # women only
        pid = client.post(
            "/populations", json={"source": "upload", "csv": blob}
        ).json()["population_id"]
        response = client.get(f"/populations/{pid}/stats/gender")
        assert response.status_code == 422

    def test_split_matches_summary(self, client):
        payload = {
            "source": "synth",
            "config": {"profile": "france", "n": 200, "seed": 5},
        }
        created = client.post("/populations", json=payload).json()
        split = client.get(
            f"/populations/{created['population_id']}/stats/split"
        ).json()
        assert split == created["summary"]["modal_split"]


class TestRationalityRoutes:
    def test_default_report(self, client):
        pid = make_synth_population(client)
        body = client.get(f"/populations/{pid}/rationality").json()
        check_schema("rationality", body)
        assert body["eval_source"] == "self"
        assert body["mask"] == []

    def test_crowd_and_halo_flags(self, client):
        pid = make_synth_population(client)
        crowd = client.get(
            f"/populations/{pid}/rationality", params={"evals": "crowd"}
        ).json()
        assert crowd["eval_source"] == "crowd"
        halo = client.get(
            f"/populations/{pid}/rationality", params={"halo": "on"}
        ).json()
        assert halo["mask"] == "halo"
        check_schema("rationality", halo)

    def test_bad_query_values(self, client):
        pid = make_synth_population(client)
        assert client.get(
            f"/populations/{pid}/rationality", params={"evals": "psychic"}
        ).status_code == 422
        assert client.get(
            f"/populations/{pid}/rationality", params={"halo": "maybe"}
        ).status_code == 422

    def test_halo_rescue(self, client):
        pid = make_synth_population(client, n=80, seed=7)
        response = client.get(f"/populations/{pid}/halo-rescue")
        assert response.status_code == 200
        check_schema("halo_rescue", response.json())


class TestScenarioRoute:
    def test_builtin_alias_conserves_population(self, client):
        pid = make_synth_population(client, n=50, seed=4)
        response = client.post(
            f"/populations/{pid}/scenarios", json={"scenario": "free-pt"}
        )
        assert response.status_code == 200
        body = response.json()
        check_schema("scenario_result", body)
        assert sum(sum(row) for row in body["transfer"]) == 50

    def test_builtin_full_name(self, client):
        pid = make_synth_population(client)
        response = client.post(
            f"/populations/{pid}/scenarios",
            json={"scenario": "Free public transport"},
        )
        assert response.status_code == 200
        assert response.json()["scenario"] == "Free public transport"

    def test_custom_scenario_with_bias(self, client):
        pid = make_synth_population(client)
        response = client.post(
            f"/populations/{pid}/scenarios",
            json={
                "scenario": {
                    "name": "nudge",
                    "overrides": [
                        {"mode": "Bus", "criterion": "Ecology", "value": 9}
                    ],
                },
                "bias_config": {"halo": True, "reactance": True},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["metadata"]["bias"]["halo"] is True
        check_schema("scenario_result", body)

    def test_degenerate_scenario(self, client):
        pid = make_synth_population(client)
        response = client.post(
            f"/populations/{pid}/scenarios",
            json={
                "scenario": {
                    "name": "broken",
                    "overrides": [
                        {"mode": "Bus", "criterion": "Ecology", "value": 17}
                    ],
                }
            },
        )
        assert response.status_code == 422

    def test_unknown_builtin(self, client):
        pid = make_synth_population(client)
        assert client.post(
            f"/populations/{pid}/scenarios", json={"scenario": "free-beer"}
        ).status_code == 422

    def test_missing_scenario_field(self, client):
        pid = make_synth_population(client)
        assert client.post(
            f"/populations/{pid}/scenarios", json={}
        ).status_code == 422

    def test_empty_population(self, client):
        pid = make_synth_population(client, n=0)
        assert client.post(
            f"/populations/{pid}/scenarios", json={"scenario": "free-pt"}
        ).status_code == 422


class TestGameRoutes:
    def start_game(self, client, **kwargs):
        pid = make_synth_population(client, **kwargs)
        response = client.post("/games", json={"population_id": pid})
        assert response.status_code == 201
        check_schema("game_created", response.json())
        return pid, response.json()["game_id"]

    def test_create_and_read(self, client):
        pid, gid = self.start_game(client, n=40, seed=6)
        body = client.get(f"/games/{gid}").json()
        check_schema("game_state", body)
        assert body["turn"] == 0
        assert body["population_id"] == pid
        assert body["history"] == []

    def test_unknown_population(self, client):
        assert client.post(
            "/games", json={"population_id": "ghost"}
        ).status_code == 404

    def test_missing_population_id(self, client):
        assert client.post("/games", json={}).status_code == 400

    def test_turns_advance_and_accumulate(self, client):
        _, gid = self.start_game(client, n=40, seed=6)
        first = client.post(f"/games/{gid}/turns", json={"scenario": "free-pt"})
        assert first.status_code == 200
        check_schema("turn", first.json())
        check_schema("scenario_result", first.json()["result"])
        assert first.json()["turn"] == 1
        second = client.post(
            f"/games/{gid}/turns", json={"scenario": "safe-lanes"}
        )
        assert second.json()["turn"] == 2
        state = client.get(f"/games/{gid}").json()
        assert state["turn"] == 2
        assert len(state["history"]) == 2
        check_schema("game_state", state)

    def test_turn_idempotency(self, client):
        _, gid = self.start_game(client, n=30, seed=8)
        headers = {"Idempotency-Key": "turn-1-retry"}
        first = client.post(
            f"/games/{gid}/turns", json={"scenario": "free-pt"}, headers=headers
        )
        replay = client.post(
            f"/games/{gid}/turns", json={"scenario": "free-pt"}, headers=headers
        )
        assert first.json() == replay.json()
        assert client.get(f"/games/{gid}").json()["turn"] == 1
        fresh = client.post(
            f"/games/{gid}/turns",
            json={"scenario": "free-pt"},
            headers={"Idempotency-Key": "turn-2"},
        )
        assert fresh.json()["turn"] == 2

    def test_turn_on_unknown_game(self, client):
        assert client.post(
            "/games/ghost/turns", json={"scenario": "free-pt"}
        ).status_code == 404

    def test_degenerate_turn_scenario(self, client):
        _, gid = self.start_game(client)
        assert client.post(
            f"/games/{gid}/turns", json={"scenario": "free-beer"}
        ).status_code == 422

    def test_delete_protection(self, client):
        pid, gid = self.start_game(client)
        assert client.delete(f"/populations/{pid}").status_code == 409
        assert client.delete(f"/games/{gid}").status_code == 204
        assert client.get(f"/games/{gid}").status_code == 404
        assert client.delete(f"/populations/{pid}").status_code == 204
        assert client.get(f"/populations/{pid}/stats/split").status_code == 404

    def test_delete_unknown(self, client):
        assert client.delete("/populations/ghost").status_code == 404
        assert client.delete("/games/ghost").status_code == 404


class TestCors:
    def test_cors_headers_when_enabled(self):
        client = TestClient(create_app(cors=True))
        pid = make_synth_population(client, n=5)
        response = client.get(
            f"/populations/{pid}/stats/split",
            headers={"Origin": "http://localhost:5173"},
        )
        assert response.headers.get("access-control-allow-origin") == "*"

    def test_no_cors_by_default(self, client):
        pid = make_synth_population(client, n=5)
        response = client.get(
            f"/populations/{pid}/stats/split",
            headers={"Origin": "http://localhost:5173"},
        )
        assert "access-control-allow-origin" not in response.headers
