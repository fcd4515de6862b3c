import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from qreward.config import EngineConfig
from qreward.fixtures import BOX_N0_SAMPLE
from qreward.fusion import best_of_n, reward
from qreward.judge import JudgeUnavailable, StubJudge
from qreward.service import create_app, model_hash
from qreward.synth import make_candidate_pool
from qreward.vrm import FeatureConfig, VrmModel

CONFIG = EngineConfig(seed=5)
MODEL = VrmModel.init(seed=5)
STUB = StubJudge(seed=5)


@pytest.fixture(scope="module")
def client():
    app = create_app(CONFIG, model=MODEL, backend=STUB)
    with TestClient(app) as c:
        yield c


class TestScore:
    def test_box_fixture_vector(self, client):
        response = client.post(
            "/v1/score",
            json={"question": BOX_N0_SAMPLE.question, "answer": BOX_N0_SAMPLE.answer},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["v"] == {"Corr": 1, "Phys": -1, "Inst": 0}
        assert body["mode"] == "vrm"

    def test_empty_answer_zero_vector(self, client):
        response = client.post("/v1/score", json={"question": "q", "answer": ""})
        assert response.status_code == 200
        assert response.json()["v"] == {"Corr": 0, "Phys": 0, "Inst": 0}

    def test_byte_parity_with_library(self, client):
        payload = {"question": BOX_N0_SAMPLE.question, "answer": BOX_N0_SAMPLE.answer}
        response = client.post("/v1/score", json=payload)
        breakdown = reward(
            payload["question"],
            payload["answer"],
            MODEL,
            STUB,
            CONFIG.lambda_map(),
            mode="vrm",
            check_config=CONFIG.check_config(),
            seed=CONFIG.seed,
        )
        expected = json.dumps(breakdown.to_json_dict(), ensure_ascii=False)
        assert response.content == expected.encode("utf-8")

    def test_same_request_identical_bodies(self, client):
        payload = {"question": "q", "answer": BOX_N0_SAMPLE.answer}
        first = client.post("/v1/score", json=payload)
        second = client.post("/v1/score", json=payload)
        assert first.content == second.content

    def test_seed_header_changes_probe_stream_not_schema(self, client):
        payload = {"question": "q", "answer": "@claim{kind=numeric, value=1, ref=x/x}"}
        a = client.post("/v1/score", json=payload, headers={"X-Seed": "1"})
        b = client.post("/v1/score", json=payload, headers={"X-Seed": "1"})
        assert a.content == b.content

    def test_malformed_json_400(self, client):
        response = client.post(
            "/v1/score", content=b"{nope", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400

    def test_missing_fields_400(self, client):
        assert client.post("/v1/score", json={"question": "q"}).status_code == 400

    def test_oversized_body_413(self, client):
        big = "x" * (256 * 1024 + 1)
        response = client.post("/v1/score", json={"question": "q", "answer": big})
        assert response.status_code == 413

    def test_judge_unavailable_503_passthrough(self):
        class Down:
            def score(self, *args, **kwargs):
                raise JudgeUnavailable("offline")

        app = create_app(
            EngineConfig(seed=5, mode="passthrough"), model=None, backend=Down()
        )
        with TestClient(app) as c:
            assert (
                c.post("/v1/score", json={"question": "q", "answer": "a"}).status_code
                == 503
            )

    def test_16_way_concurrent_identical(self, client):
        payload = {"question": "q", "answer": BOX_N0_SAMPLE.answer}

        def call(_):
            return client.post("/v1/score", json=payload).content

        with ThreadPoolExecutor(max_workers=16) as pool:
            bodies = list(pool.map(call, range(16)))
        assert len(set(bodies)) == 1


class TestBestOfN:
    def test_single_candidate(self, client):
        response = client.post(
            "/v1/bon", json={"question": "q", "candidates": ["only"]}
        )
        assert response.status_code == 200
        assert response.json()["selected"] == 0

    def test_matches_library(self, client):
        question, ref, pool = make_candidate_pool(5, 6, trial=0)
        candidates = [a for a, _ in pool]
        response = client.post(
            "/v1/bon",
            json={"question": question, "candidates": candidates, "reference": ref},
        )
        selected, breakdowns = best_of_n(
            question,
            candidates,
            MODEL,
            STUB,
            CONFIG.lambda_map(),
            mode="vrm",
            check_config=CONFIG.check_config(),
            reference=ref,
            seed=CONFIG.seed,
        )
        body = response.json()
        assert body["selected"] == selected
        assert [b["total"] for b in body["breakdowns"]] == [
            b.total for b in breakdowns
        ]

    def test_empty_candidates_400(self, client):
        response = client.post("/v1/bon", json={"question": "q", "candidates": []})
        assert response.status_code == 400

    def test_over_limit_422(self, client):
        response = client.post(
            "/v1/bon", json={"question": "q", "candidates": ["a"] * 65}
        )
        assert response.status_code == 422

    def test_at_limit_ok(self, client):
        response = client.post(
            "/v1/bon", json={"question": "q", "candidates": ["a"] * 64}
        )
        assert response.status_code == 200


class TestVerifyEndpoint:
    def test_ses_only(self, client):
        response = client.post(
            "/v1/verify", json={"answer": BOX_N0_SAMPLE.answer, "question": "q"}
        )
        body = response.json()
        assert body["v"] == {"Corr": 1, "Phys": -1, "Inst": 0}
        assert body["unparsable"] is False
        assert len(body["reports"]) == 12

    def test_requires_answer(self, client):
        assert client.post("/v1/verify", json={"question": "q"}).status_code == 400


class TestHealth:
    def test_healthz_fields(self, client):
        body = client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["feature_version"]
        assert body["model_hash"] != "no-model"

    def test_model_hash_tracks_file(self, tmp_path):
        path_a = tmp_path / "a.json"
        path_b = tmp_path / "b.json"
        VrmModel.init(seed=1).save(path_a)
        VrmModel.init(seed=1).save(path_b)
        assert model_hash(None, str(path_a)) == model_hash(None, str(path_b))
        VrmModel.init(seed=2).save(path_b)
        assert model_hash(None, str(path_a)) != model_hash(None, str(path_b))


class TestStartupGuards:
    def test_vrm_mode_requires_model(self):
        with pytest.raises(ValueError):
            create_app(EngineConfig(), model=None, backend=STUB)

    def test_feature_version_mismatch_refused(self):
        stale = VrmModel.init(seed=0, feature_config=FeatureConfig(version="old/0"))
        with pytest.raises(ValueError):
            create_app(EngineConfig(), model=stale, backend=STUB)


class TestAuth:
    def test_bearer_required_when_configured(self, monkeypatch):
        monkeypatch.setenv("QREWARD_BEARER_TOKEN", "hunter2")
        app = create_app(CONFIG, model=MODEL, backend=STUB)
        with TestClient(app) as c:
            denied = c.post("/v1/score", json={"question": "q", "answer": "a"})
            assert denied.status_code == 401
            allowed = c.post(
                "/v1/score",
                json={"question": "q", "answer": "a"},
                headers={"Authorization": "Bearer hunter2"},
            )
            assert allowed.status_code == 200
