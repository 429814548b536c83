"""Seeded synthetic benchmark over blur scenarios, noise levels and restoration methods.

Every cell synthesises its own ground truth and noise from the cell seed, so cells are
independent and the report does not depend on how many run at once.
"""
from __future__ import annotations

import asyncio
import csv
import io

import numpy as np
from pydantic import BaseModel

from hsipnp.core.cube import HsiCube
from hsipnp.degradation.kernels import make_kernel
from hsipnp.degradation.noise import degrade
from hsipnp.degradation.scenarios import SCENARIOS
from hsipnp.degradation.synthetic import synthesize_smooth_cube
from hsipnp.denoiser.b3ddn import B3ddnDenoiser, B3ddnWeights
from hsipnp.denoiser.base import DENOISERS, Denoiser
from hsipnp.denoiser.spectral import SpectralShrinkageDenoiser
from hsipnp.exception import ConfigError
from hsipnp.io.config import OBSERVATION_METHOD, RunConfig
from hsipnp.logger import logger
from hsipnp.metrics import METRIC_COLUMNS, MetricReport, evaluate
from hsipnp.solver.admm import deconvolve
from hsipnp.solver.state import format_number

BENCH_COLUMNS = ('scenario', 'method', 'sigma', 'metric', 'mean', 'std', 'runs')


class BenchCell(BaseModel):
    scenario: str
    sigma: float
    seed: int


class CellResult(BaseModel):
    cell: BenchCell
    method: str
    report: MetricReport
    iterations: int = 0


class BenchmarkReport(BaseModel):
    results: list[CellResult]

    def to_csv(self) -> str:
        """One row per (sigma, scenario, method, metric): mean and population std over seeds."""
        groups: dict[tuple[float, str, str], list[MetricReport]] = {}
        for result in self.results:
            key = (result.cell.sigma, result.cell.scenario, result.method)
            groups.setdefault(key, []).append(result.report)

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(BENCH_COLUMNS)
        for (sigma, scenario, method), reports in groups.items():
            for metric in METRIC_COLUMNS:
                values = np.array([getattr(report, metric) for report in reports])
                writer.writerow([
                    scenario,
                    method,
                    format_number(sigma),
                    metric,
                    format_number(values.mean()),
                    format_number(values.std()),
                    len(values),
                ])
        return buffer.getvalue()


def plan_cells(config: RunConfig) -> list[BenchCell]:
    sigmas: list[float | None] = list(config.bench_sigmas) or [None]
    cells = []
    for sigma in sigmas:
        for name in config.scenarios:
            scenario = SCENARIOS[name]
            for seed in config.seeds:
                cells.append(BenchCell(scenario=name, sigma=scenario.sigma if sigma is None else sigma, seed=seed))
    return cells


def make_denoiser(method: str, config: RunConfig, weights: B3ddnWeights | None) -> Denoiser:
    match method:
        case 'baseline':
            return SpectralShrinkageDenoiser(strength=config.strength)
        case 'b3ddn':
            if weights is None:
                raise ConfigError('Method b3ddn needs network weights (config key "weights" or --weights)')
            return B3ddnDenoiser(weights=weights)
        case _:
            return DENOISERS[method]()


def run_cell(cell: BenchCell, config: RunConfig, weights: B3ddnWeights | None = None) -> list[CellResult]:
    truth_seed, noise_seed = (int(s) for s in np.random.SeedSequence(cell.seed).generate_state(2))
    scenario = SCENARIOS[cell.scenario]
    truth = synthesize_smooth_cube(*config.shape, seed=truth_seed)
    kernels = make_kernel(scenario.kernel)
    observation = degrade(truth, kernels, scenario.noise(noise_seed, cell.sigma))

    results = []
    for method in config.methods:
        if method == OBSERVATION_METHOD:
            estimate: HsiCube = observation
            iterations = 0
        else:
            estimate, state = deconvolve(
                observation, kernels, make_denoiser(method, config, weights), config.solver_options()
            )
            iterations = state.k
        report = evaluate(estimate, truth, config.mean_of)
        results.append(CellResult(cell=cell, method=method, report=report, iterations=iterations))
        logger.info(
            f'bench {cell.scenario} sigma={cell.sigma:g} seed={cell.seed} {method}: '
            f'rmse={report.rmse:.4f} psnr={report.psnr:.2f} iters={iterations}'
        )
    return results


async def run_benchmark(config: RunConfig, weights: B3ddnWeights | None = None) -> BenchmarkReport:
    config.check()
    if 'b3ddn' in config.methods and weights is None:
        raise ConfigError('Method b3ddn needs network weights (config key "weights" or --weights)')

    semaphore = asyncio.Semaphore(config.workers)

    async def run_bounded(cell: BenchCell) -> list[CellResult]:
        async with semaphore:
            return await asyncio.to_thread(run_cell, cell, config, weights)

    cells = plan_cells(config)
    logger.info(f'benchmark: {len(cells)} cells x {len(config.methods)} methods on {config.workers} workers')
    batches = await asyncio.gather(*(run_bounded(cell) for cell in cells))
    return BenchmarkReport(results=[result for batch in batches for result in batch])
