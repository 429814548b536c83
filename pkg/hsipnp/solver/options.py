from __future__ import annotations

from pydantic import BaseModel

from hsipnp.exception import SpecError
from hsipnp.logger import logger
from hsipnp.solver.constants import GOLDEN_DELTA, InitMode, SearchRule


class SolverOptions(BaseModel):
    bracket_a: float = 0.0
    bracket_b: float = 10.0
    epsilon: float = 0.001
    zeta: float = 0.0002
    max_iters: int = 50
    init: InitMode = InitMode.OBSERVATION
    delta: float = GOLDEN_DELTA
    search_rule: SearchRule = SearchRule.MINIMIZE
    fixed_rho: float | None = None
    use_stopping_rule: bool = True
    fft_workers: int | None = None

    def check(self) -> SolverOptions:
        if not 0 <= self.bracket_a < self.bracket_b:
            raise SpecError(f'Bracket must satisfy 0 <= a < b, got [{self.bracket_a}, {self.bracket_b}]')
        if self.epsilon <= 0:
            raise SpecError(f'epsilon must be positive, got {self.epsilon}')
        if self.zeta <= 0:
            raise SpecError(f'zeta must be positive, got {self.zeta}')
        if self.max_iters < 1:
            raise SpecError(f'max_iters must be at least 1, got {self.max_iters}')
        if not 0.5 < self.delta < 1:
            raise SpecError(f'delta must lie in (0.5, 1), got {self.delta}')
        if self.fixed_rho is not None and self.fixed_rho <= 0:
            raise SpecError(f'fixed_rho must be positive, got {self.fixed_rho}')
        if self.fft_workers is not None and self.fft_workers < 1:
            raise SpecError(f'fft_workers must be at least 1, got {self.fft_workers}')
        if self.search_rule is SearchRule.LEGACY:
            logger.warning('Legacy bracketing rule selected, it can discard the whiteness minimiser')
        return self
