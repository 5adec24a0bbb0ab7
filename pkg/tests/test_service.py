import math

import pytest
from fastapi.testclient import TestClient

from smalldev import __version__
from smalldev.service import app

from _frozen import SUP_CDF

client = TestClient(app)


def test_health():
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json() == {"status": "ok", "version": __version__}


def test_brownian_sup_cdf_endpoint():
    res = client.post("/brownian/sup-cdf", json={"x": 1.0, "abs_tol": 1e-10})
    assert res.status_code == 200
    body = res.json()
    assert body["value"] == pytest.approx(SUP_CDF[1.0], abs=1e-10)
    assert body["k_terms"] >= 1


def test_domain_error_maps_to_400():
    res = client.post("/brownian/sup-cdf", json={"x": -1.0})
    assert res.status_code == 400
    assert "x" in res.json()["detail"]


def test_request_shape_error_maps_to_422():
    res = client.post("/brownian/sup-cdf", json={"x": "not-a-number"})
    assert res.status_code == 422


def test_series_endpoint_lambda_form():
    res = client.post("/series/weighted",
                      json={"r": 2.0, "a": 0.0, "tau": 0.0, "lam": 0.05})
    assert res.status_code == 200
    body = res.json()
    assert body["normalized"] == pytest.approx(1.2603599667851676, rel=1e-7)
    assert body["analytic_limit"] == pytest.approx(4 / math.pi, rel=1e-12)
    assert body["total"] == pytest.approx(body["partial_sum"] + body["tail_correction"])


def test_series_endpoint_requires_exactly_one_parametrization():
    res = client.post("/series/weighted", json={"r": 2.0})
    assert res.status_code == 400
    res = client.post("/series/weighted",
                      json={"r": 2.0, "lam": 0.1, "eps": 0.9})
    assert res.status_code == 400


def test_divergent_series_maps_to_409():
    res = client.post("/series/weighted", json={"r": 2.0, "eps": 1.1})
    assert res.status_code == 409
    assert "diverges" in res.json()["detail"]


def test_limit_probe_endpoint():
    res = client.post("/series/limit-probe",
                      json={"r": 2.0, "lambdas": [0.1, 0.05], "agree_tol": 0.05})
    assert res.status_code == 200
    body = res.json()
    assert len(body["rows"]) == 2
    assert body["agrees"] is True
    assert body["analytic"] == pytest.approx(4 / math.pi, rel=1e-12)


def test_simulate_endpoint_is_deterministic():
    req = {"law": "rademacher", "n": 100, "eps": 0.8, "samples": 2000, "seed": 42}
    r1 = client.post("/simulate/estimate", json=req)
    r2 = client.post("/simulate/estimate", json=req)
    assert r1.status_code == 200
    assert r1.json() == r2.json()
    assert r1.json()["successes"] >= 0


def test_simulate_endpoint_rejects_unknown_law():
    res = client.post("/simulate/estimate",
                      json={"law": "levy", "n": 10, "eps": 1.0,
                            "samples": 200, "seed": 1})
    assert res.status_code == 400


def test_dichotomy_endpoint():
    res = client.post("/dichotomy/classify",
                      json={"c": 1.5, "r": 2.0, "n_max": 1000})
    assert res.status_code == 200
    body = res.json()
    assert body["verdict"] == "Converges"
    assert body["cutoffs"] == [10, 100, 1000]


def test_oracle_endpoints():
    res = client.post("/oracle/rademacher", json={"n": 2, "x": 1.0})
    assert res.status_code == 200
    assert res.json()["value"] == pytest.approx(0.5, abs=1e-15)
    res = client.post("/oracle/gaussian-grid",
                      json={"n": 1, "x": 2.0, "grid_points": 512})
    assert res.status_code == 200
    body = res.json()
    assert abs(body["value"] - math.erf(2 / math.sqrt(2))) \
        <= body["error_estimate"] + 1e-9
