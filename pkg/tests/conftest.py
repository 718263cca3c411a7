from typing import Callable, Sequence

import numpy as np
import pytest
from fastapi import FastAPI

from hypercube_cops import (
    GameConfig,
    GameState,
    LinkedModel,
    Phase,
    VertexSet,
    new_game,
)

app_ = FastAPI()


@app_.get("/mock_bounds/{n}")
def mock_read_bounds() -> None:
    pass


@pytest.fixture()
def app() -> FastAPI:
    LinkedModel.init_app(app_)
    return app_


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture()
def make_state() -> Callable[..., GameState]:
    """Builds a mid-game state from a robber set and cop sets given as element lists."""

    def make(
        n: int,
        robber: Sequence[int],
        cops: Sequence[Sequence[int]],
        phase: Phase = Phase.ROBBER,
    ) -> GameState:
        masks = np.array([VertexSet.of(cop) for cop in cops], dtype=np.uint64)
        base = new_game(GameConfig(n=n, cop_count=len(cops)))
        round_ = n - len(robber) + 1
        return base.model_copy(
            update={
                "round": round_,
                "phase": phase,
                "robber": VertexSet.of(robber),
                "cops": masks,
                "cop_ids": np.arange(len(cops), dtype=np.int64),
            }
        )

    return make
