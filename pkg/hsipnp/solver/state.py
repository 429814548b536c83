from __future__ import annotations

import csv
import io

from pydantic import BaseModel, ConfigDict, Field

from hsipnp.core.cube import HsiCube
from hsipnp.solver.constants import StopStatus

TRACE_COLUMNS = ('iteration', 'rho_star', 'whiteness', 'data_fidelity', 'elapsed_ms')


def format_number(value: float) -> str:
    # repr() of a Python float is locale independent and round-trips exactly.
    return repr(float(value))


class SolverState(BaseModel):
    """ADMM iterates x, z, u and per-iteration diagnostics of one solve."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: HsiCube
    z: HsiCube
    u: HsiCube
    k: int = 0
    status: StopStatus = StopStatus.RUNNING
    initial_whiteness: float | None = None
    initial_fidelity: float = 0.0
    rho_history: list[float] = Field(default_factory=list)
    w_history: list[float] = Field(default_factory=list)
    fidelity_history: list[float] = Field(default_factory=list)
    gap_history: list[float] = Field(default_factory=list)
    elapsed_ms: list[float] = Field(default_factory=list)
    rmse_history: list[float] | None = None

    def record(self, rho: float, w: float, fidelity: float, gap: float, elapsed_ms: float) -> None:
        self.k += 1
        self.rho_history.append(rho)
        self.w_history.append(w)
        self.fidelity_history.append(fidelity)
        self.gap_history.append(gap)
        self.elapsed_ms.append(elapsed_ms)

    def to_csv(self, include_timing: bool = True) -> str:
        columns = list(TRACE_COLUMNS)
        if self.rmse_history is not None:
            columns.append('rmse')

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for inx in range(self.k):
            row = [
                str(inx + 1),
                format_number(self.rho_history[inx]),
                format_number(self.w_history[inx]),
                format_number(self.fidelity_history[inx]),
                format_number(self.elapsed_ms[inx] if include_timing else 0.0),
            ]
            if self.rmse_history is not None:
                row.append(format_number(self.rmse_history[inx]))
            writer.writerow(row)
        return buffer.getvalue()
