from collections.abc import Callable

from pydantic import BaseModel

from hsipnp.logger import logger
from hsipnp.solver.constants import GOLDEN_DELTA, SearchRule


class GoldenSearchResult(BaseModel):
    argmin: float
    lower: float
    upper: float
    evaluations: int
    widths: list[float]


def golden_section_search(
    func: Callable[[float], float],
    a: float,
    b: float,
    epsilon: float,
    delta: float = GOLDEN_DELTA,
    rule: SearchRule = SearchRule.MINIMIZE,
) -> GoldenSearchResult:
    """Bracket a minimum of ``func`` on [a, b] until the bracket is no wider than ``epsilon``.

    Both interior points are evaluated at every step, so each step costs two calls and
    leaves a bracket of width ``delta * (b - a)`` (``(1 - delta) * (b - a)`` under the legacy rule).
    """
    widths = [b - a]
    evaluations = 0

    while b - a > epsilon:
        span = b - a
        upper_point = a + delta * span
        lower_point = b - delta * span
        upper_value = func(upper_point)
        lower_value = func(lower_point)
        evaluations += 2
        logger.debug(
            f'golden [{a:.6g}, {b:.6g}]: W({lower_point:.6g})={lower_value:.6g} W({upper_point:.6g})={upper_value:.6g}'
        )

        if rule is SearchRule.LEGACY:
            if upper_value < lower_value:
                b = lower_point
            else:
                a = upper_point
        elif lower_value <= upper_value:
            b = upper_point
        else:
            a = lower_point
        widths.append(b - a)

    return GoldenSearchResult(argmin=(a + b) / 2, lower=a, upper=b, evaluations=evaluations, widths=widths)
