import asyncio

import pytest

from hsipnp.bench import BENCH_COLUMNS, BenchCell, plan_cells, run_benchmark, run_cell
from hsipnp.denoiser.b3ddn import B3ddnWeights
from hsipnp.exception import ConfigError
from hsipnp.io.config import RunConfig


def _config(**values) -> RunConfig:
    base = {'scenarios': ['f'], 'seeds': [0, 1], 'shape': (2, 8, 8), 'methods': ['observation', 'ridge'],
            'max_iters': 3}
    return RunConfig.model_validate(base | values).check()


def test_cells_follow_scenario_noise():
    cells = plan_cells(_config(scenarios=['a', 'c']))
    assert [(c.scenario, c.sigma, c.seed) for c in cells] == [
        ('a', 0.01, 0), ('a', 0.01, 1), ('c', 0.03, 0), ('c', 0.03, 1)
    ]


def test_sigma_sweep_overrides_scenarios():
    cells = plan_cells(_config(bench_sigmas=[0.02, 0.05]))
    assert sorted({c.sigma for c in cells}) == [0.02, 0.05]
    assert len(cells) == 4


def test_cell_reports_every_method():
    results = run_cell(BenchCell(scenario='f', sigma=0.01, seed=3), _config())
    assert [r.method for r in results] == ['observation', 'ridge']
    assert results[0].iterations == 0
    assert 1 <= results[1].iterations <= 3


def test_report_is_independent_of_worker_count():
    serial = asyncio.run(run_benchmark(_config(workers=1))).to_csv()
    parallel = asyncio.run(run_benchmark(_config(workers=4))).to_csv()
    assert serial == parallel

    lines = serial.splitlines()
    assert lines[0] == ','.join(BENCH_COLUMNS)
    assert len(lines) == 1 + 2 * 4
    observation_rmse = lines[1].split(',')
    assert observation_rmse[:4] == ['f', 'observation', '0.01', 'rmse']
    assert observation_rmse[-1] == '2'


def test_b3ddn_method_needs_weights():
    with pytest.raises(ConfigError):
        asyncio.run(run_benchmark(_config(methods=['b3ddn'])))
    report = asyncio.run(run_benchmark(_config(methods=['b3ddn'], seeds=[0]),
                                       B3ddnWeights.zeros(1, 2)))
    assert {r.method for r in report.results} == {'b3ddn'}
