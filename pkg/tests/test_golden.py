import math

import numpy as np
import pytest

from hsipnp.logger import logger
from hsipnp.solver.constants import SearchRule
from hsipnp.solver.golden import golden_section_search


def _parabola(rho: float) -> float:
    return (rho - 3.0) ** 2


def test_finds_parabola_minimum():
    result = golden_section_search(_parabola, 0.0, 10.0, 0.001)
    assert result.argmin == pytest.approx(3.0, abs=0.002)
    assert result.upper - result.lower <= 0.001


def test_bracket_shrinks_by_delta_each_step():
    widths = np.array(golden_section_search(_parabola, 0.0, 10.0, 0.001).widths)
    np.testing.assert_allclose(widths[1:] / widths[:-1], 0.618, rtol=1e-9)


def test_evaluation_count():
    result = golden_section_search(_parabola, 0.0, 10.0, 0.001)
    assert result.evaluations == 2 * math.ceil(math.log(0.001 / 10.0) / math.log(0.618))
    assert result.evaluations == 2 * (len(result.widths) - 1)


def test_increasing_objective_returns_left_edge():
    result = golden_section_search(lambda rho: rho, 0.0, 10.0, 0.001)
    assert result.argmin == pytest.approx(0.0, abs=0.001)


def test_decreasing_objective_returns_right_edge():
    result = golden_section_search(lambda rho: -rho, 2.0, 10.0, 0.001)
    assert result.argmin == pytest.approx(10.0, abs=0.001)


def test_legacy_rule_keeps_0382_and_can_lose_the_minimum():
    result = golden_section_search(_parabola, 0.0, 10.0, 0.001, rule=SearchRule.LEGACY)
    widths = np.array(result.widths)
    np.testing.assert_allclose(widths[1:] / widths[:-1], 0.382, rtol=1e-9)
    assert result.evaluations <= 2 * math.ceil(math.log(0.001 / 10.0) / math.log(0.382))
    assert result.argmin > 6.0


def test_already_narrow_bracket_needs_no_evaluations():
    result = golden_section_search(_parabola, 1.0, 1.0005, 0.001)
    assert result.evaluations == 0
    assert result.argmin == pytest.approx(1.00025)


def test_every_step_is_logged_at_debug_level():
    messages = []
    logger.enable('hsipnp')
    logger.add(messages.append, level='DEBUG', format='{message}')
    result = golden_section_search(_parabola, 0.0, 10.0, 0.001)
    steps = [message for message in messages if message.startswith('golden [')]
    assert len(steps) == len(result.widths) - 1
