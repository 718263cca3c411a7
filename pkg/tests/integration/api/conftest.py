import pytest
from fastapi.testclient import TestClient

from hypercube_cops import LinkedModel
from hypercube_cops.api import app


@pytest.fixture()
def api_client() -> TestClient:
    LinkedModel.init_app(app)

    return TestClient(app=app, base_url="http://copstestserver")


@pytest.fixture()
def estimate_payload() -> dict:
    return {
        "n": 8,
        "cop_count": 30,
        "cop_strategy": "paper",
        "robber_strategy": "greedy",
        "trials": 50,
        "seed": 4,
    }
