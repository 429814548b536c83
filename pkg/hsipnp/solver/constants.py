from enum import StrEnum

GOLDEN_DELTA = 0.618


class InitMode(StrEnum):
    OBSERVATION = 'observation'
    ADJOINT = 'adjoint'


class SearchRule(StrEnum):
    MINIMIZE = 'minimize'
    # Update rule exactly as printed: keeps the sub-interval on the side of the larger whiteness.
    LEGACY = 'legacy'


class StopStatus(StrEnum):
    RUNNING = 'running'
    CONVERGED = 'converged'
    MAX_ITERS = 'max_iters'
    EXACT_FIT = 'exact_fit'
