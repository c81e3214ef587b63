import numpy as np
import pytest

from coopscenario.config import parse_game
from coopscenario.game import GameDefinition, UncertaintyModel
from coopscenario.presets import benchmark_game

# hand-checked member of the noise-free benchmark core
BENCH_WITNESS = np.array([4.0, 4.5, 3.0, 5.8])


@pytest.fixture(scope="session")
def bench():
    return parse_game(benchmark_game({"kind": "none"}))


@pytest.fixture(scope="session")
def bench_uniform(bench):
    return bench.with_noise(UncertaintyModel.uniform(-0.5, 0.5))


@pytest.fixture(scope="session")
def bench_truncnorm(bench):
    return bench.with_noise(UncertaintyModel.truncnorm(0.0, 0.3, -1.5, 1.5))


def pairwise_game(pair_value):
    """Three agents, singletons worth 0, pairs worth ``pair_value``, grand coalition 2."""
    return GameDefinition.from_mapping(3, 2.0, {1: 0, 2: 0, 4: 0, 3: pair_value, 5: pair_value, 6: pair_value})


def random_three_agent_game(rng, noise=0.5):
    """Random 3-agent game with a nonempty nominal core, uniform noise of width ``2*noise``."""
    single = rng.uniform(0, 1, 3)
    pairs = rng.uniform(1.0, 2.5, 3)
    # balancedness: every partition and the fractional pair cover fit under the grand value
    partitions = [pairs[0] + single[2], pairs[1] + single[1], pairs[2] + single[0]]
    grand = max(single.sum(), pairs.sum() / 2, *partitions) + rng.uniform(1.0, 2.0)
    nominal = {1: single[0], 2: single[1], 4: single[2], 3: pairs[0], 5: pairs[1], 6: pairs[2]}
    return GameDefinition.from_mapping(3, grand, nominal, default_noise=UncertaintyModel.uniform(-noise, noise))


# acceptance verdicts, printed after the run regardless of output capture
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
