"""``hsipnp`` command line: degrade -> deconvolve -> metrics, plus kernels, training and benchmarks."""
from __future__ import annotations

import argparse
import asyncio
import csv
import io
import sys
from collections.abc import Awaitable, Callable, Sequence
from pathlib import Path

from hsipnp import __version__
from hsipnp.bench import run_benchmark
from hsipnp.core.constants import SampleDType, Subcommand
from hsipnp.core.cube import KernelStack
from hsipnp.degradation.kernels import KernelSpec, make_kernel
from hsipnp.degradation.noise import degrade
from hsipnp.degradation.synthetic import normalize_quantile, synthesize_smooth_cube
from hsipnp.denoiser.b3ddn import B3ddnDenoiser
from hsipnp.denoiser.base import Denoiser
from hsipnp.denoiser.spectral import SpectralShrinkageDenoiser
from hsipnp.denoiser.train import synthetic_training_set, train_b3ddn
from hsipnp.exception import CliUsageError, HsiPnpError
from hsipnp.io.config import RunConfig
from hsipnp.io.formats import (
    read_cube,
    read_kernel,
    read_weights,
    write_cube,
    write_kernel,
    write_text,
    write_weights,
)
from hsipnp.logger import configure as configure_logging
from hsipnp.logger import logger
from hsipnp.metrics import METRIC_COLUMNS, MeanOf, evaluate
from hsipnp.solver.admm import deconvolve
from hsipnp.solver.state import format_number

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Clean cubes synthesised for `train` when no --input is given.
TRAIN_SYNTHETIC_COUNT = 8

LOG_LEVELS = ('TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR', 'CRITICAL')


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CliUsageError(f'{self.prog}: {message}')


def _output_dtype(args: argparse.Namespace) -> SampleDType:
    return SampleDType.FLOAT32 if args.float32 else SampleDType.FLOAT64


async def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        return RunConfig()
    return await RunConfig.load(args.config)


async def _load_kernels(args: argparse.Namespace, config: RunConfig) -> KernelStack:
    """--kernel file, else --kernel-spec, else the configured kernel."""
    if args.kernel is not None:
        return await read_kernel(args.kernel)
    spec = KernelSpec.parse(args.kernel_spec) if args.kernel_spec else config.kernel
    return make_kernel(spec)


async def _load_denoiser(args: argparse.Namespace, config: RunConfig) -> Denoiser:
    if args.weights is not None:
        return B3ddnDenoiser(weights=await read_weights(args.weights))
    return SpectralShrinkageDenoiser(strength=config.strength if args.strength is None else args.strength)


async def cmd_make_kernel(args: argparse.Namespace) -> None:
    kernels = make_kernel(KernelSpec.parse(args.kernel_spec), bands=args.bands)
    await write_kernel(kernels, args.output)


async def cmd_degrade(args: argparse.Namespace) -> None:
    config = (await _load_config(args)).override(sigma=args.sigma, seed=args.seed, snr_db=args.snr_db)
    x = await read_cube(args.input)
    y = degrade(x, await _load_kernels(args, config), config.noise_spec())
    await write_cube(y, args.output, _output_dtype(args))


async def cmd_deconvolve(args: argparse.Namespace) -> None:
    bracket_a, bracket_b = args.bracket or (None, None)
    config = (await _load_config(args)).override(
        max_iters=args.max_iters,
        zeta=args.zeta,
        epsilon=args.epsilon,
        bracket_a=bracket_a,
        bracket_b=bracket_b,
    )
    y = await read_cube(args.input)
    kernels = await _load_kernels(args, config)
    denoiser = await _load_denoiser(args, config)
    reference = await read_cube(args.ref) if args.ref is not None else None

    x, state = deconvolve(y, kernels, denoiser, config.solver_options(), reference=reference)
    logger.info(f'deconvolve: {state.status} after {state.k} iterations')

    await write_cube(x, args.output, _output_dtype(args))
    if args.trace is not None:
        await write_text(args.trace, state.to_csv(include_timing=not args.deterministic))


async def cmd_denoise(args: argparse.Namespace) -> None:
    config = await _load_config(args)
    z = await read_cube(args.input)
    denoiser = await _load_denoiser(args, config)
    await write_cube(denoiser(z), args.output, _output_dtype(args))


async def cmd_train(args: argparse.Namespace) -> None:
    config = (await _load_config(args)).override(seed=args.seed, steps_per_epoch=args.steps)
    opts = config.train_options()
    if args.deterministic:
        opts = opts.model_copy(update={'deterministic': True})

    if args.input:
        dataset = [await read_cube(path) for path in args.input]
    else:
        bands = opts.patch_bands or opts.patch_size
        side = 2 * opts.patch_size
        dataset = synthetic_training_set(TRAIN_SYNTHETIC_COUNT, bands, side, side, seed=opts.seed)
    initial = await read_weights(args.weights) if args.weights is not None else None

    result = train_b3ddn(dataset, opts, initial=initial)
    await write_weights(result.weights, args.output)
    if args.trace is not None:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(('step', 'loss'))
        writer.writerows((step, format_number(loss)) for step, loss in enumerate(result.losses, start=1))
        await write_text(args.trace, buffer.getvalue())


async def cmd_metrics(args: argparse.Namespace) -> None:
    reference = await read_cube(args.ref)
    test = await read_cube(args.test)
    report = evaluate(test, reference, MeanOf(args.mean_of))
    if args.header:
        print(','.join(METRIC_COLUMNS))
    print(report.csv_row())


async def cmd_benchmark(args: argparse.Namespace) -> None:
    config = (await _load_config(args)).override(workers=args.workers)
    weights_path = args.weights or config.weights
    weights = await read_weights(weights_path) if weights_path else None

    report = await run_benchmark(config, weights)
    table = report.to_csv()
    if args.output is None:
        print(table, end='')
    else:
        await write_text(args.output, table)


async def cmd_synthesize(args: argparse.Namespace) -> None:
    cube = synthesize_smooth_cube(
        *args.shape, seed=args.seed, components=args.components, max_frequency=args.max_frequency
    )
    await write_cube(cube, args.output, _output_dtype(args))


async def cmd_normalize(args: argparse.Namespace) -> None:
    cube = await read_cube(args.input)
    await write_cube(normalize_quantile(cube, args.quantile), args.output, _output_dtype(args))


COMMANDS: dict[Subcommand, Callable[[argparse.Namespace], Awaitable[None]]] = {
    Subcommand.MAKE_KERNEL: cmd_make_kernel,
    Subcommand.DEGRADE: cmd_degrade,
    Subcommand.DECONVOLVE: cmd_deconvolve,
    Subcommand.DENOISE: cmd_denoise,
    Subcommand.TRAIN: cmd_train,
    Subcommand.METRICS: cmd_metrics,
    Subcommand.BENCHMARK: cmd_benchmark,
    Subcommand.SYNTHESIZE: cmd_synthesize,
    Subcommand.NORMALIZE: cmd_normalize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='hsipnp', description='Tuning-free plug-and-play ADMM hyperspectral deconvolution')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default='WARNING', type=str.upper, choices=LOG_LEVELS)
    commands = parser.add_subparsers(dest='command', required=True, metavar='command')

    def command(name: Subcommand, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name.value, help=help_text)
        sub.set_defaults(command=name)
        return sub

    def config_flag(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--config', type=Path, help='flat key = value run configuration')

    def kernel_flags(sub: argparse.ArgumentParser) -> None:
        group = sub.add_mutually_exclusive_group()
        group.add_argument('--kernel', type=Path, help='PSF1 kernel file')
        group.add_argument('--kernel-spec', help='compact kernel, e.g. gaussian:9:2')

    def cube_output(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--output', type=Path, required=True)
        sub.add_argument('--float32', action='store_true', help='write 32-bit samples')

    def denoiser_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--weights', type=Path, help='B3W1 network weights; baseline shrinkage when absent')
        sub.add_argument('--strength', type=float, help='baseline shrinkage strength')

    sub = command(Subcommand.MAKE_KERNEL, 'write a parametric blur kernel')
    sub.add_argument('--kernel-spec', required=True)
    sub.add_argument('--bands', type=int, default=1, help='replicate the kernel for this many bands')
    sub.add_argument('--output', type=Path, required=True)

    sub = command(Subcommand.DEGRADE, 'blur a clean cube and add Gaussian noise')
    sub.add_argument('--input', type=Path, required=True)
    kernel_flags(sub)
    sub.add_argument('--sigma', type=float)
    sub.add_argument('--snr-db', type=float, help='noise level from the blurred signal power, overrides --sigma')
    sub.add_argument('--seed', type=int)
    config_flag(sub)
    cube_output(sub)

    sub = command(Subcommand.DECONVOLVE, 'restore a blurred cube with PnP-ADMM')
    sub.add_argument('--input', type=Path, required=True)
    kernel_flags(sub)
    denoiser_flags(sub)
    config_flag(sub)
    sub.add_argument('--max-iters', type=int)
    sub.add_argument('--zeta', type=float)
    sub.add_argument('--epsilon', type=float)
    sub.add_argument('--bracket', type=float, nargs=2, metavar=('A', 'B'))
    sub.add_argument('--ref', type=Path, help='clean cube; adds an rmse column to the trace')
    sub.add_argument('--trace', type=Path, help='per-iteration CSV')
    sub.add_argument('--deterministic', action='store_true', help='write zero timings to the trace')
    cube_output(sub)

    sub = command(Subcommand.DENOISE, 'apply a denoiser to a cube of any band count')
    sub.add_argument('--input', type=Path, required=True)
    denoiser_flags(sub)
    config_flag(sub)
    cube_output(sub)

    sub = command(Subcommand.TRAIN, 'train the blind 3D denoising network')
    sub.add_argument('--input', type=Path, action='append', help='clean training cube (repeatable)')
    sub.add_argument('--weights', type=Path, help='initial weights to continue from')
    sub.add_argument('--seed', type=int)
    sub.add_argument('--steps', type=int, help='steps per epoch')
    sub.add_argument('--trace', type=Path, help='loss curve CSV')
    sub.add_argument('--deterministic', action='store_true')
    sub.add_argument('--output', type=Path, required=True)
    config_flag(sub)

    sub = command(Subcommand.METRICS, 'print RMSE, PSNR, SSIM and ERGAS as one CSV row')
    sub.add_argument('--ref', type=Path, required=True)
    sub.add_argument('--test', type=Path, required=True)
    sub.add_argument('--mean-of', choices=[m.value for m in MeanOf], default=MeanOf.REFERENCE.value)
    sub.add_argument('--header', action='store_true')

    sub = command(Subcommand.BENCHMARK, 'run the seeded scenario grid')
    config_flag(sub)
    sub.add_argument('--weights', type=Path)
    sub.add_argument('--workers', type=int)
    sub.add_argument('--output', type=Path, help='results CSV; stdout when absent')

    sub = command(Subcommand.SYNTHESIZE, 'write a smooth synthetic clean cube')
    sub.add_argument('--shape', type=int, nargs=3, metavar=('N', 'P', 'Q'), default=[8, 32, 32])
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--components', type=int, default=6)
    sub.add_argument('--max-frequency', type=int, default=3)
    cube_output(sub)

    sub = command(Subcommand.NORMALIZE, 'scale a cube so a high quantile maps to 1')
    sub.add_argument('--input', type=Path, required=True)
    sub.add_argument('--quantile', type=float, default=0.999)
    cube_output(sub)

    return parser


def _report(exc: BaseException) -> None:
    message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
    print(f'hsipnp: error: {" ".join(str(message).split())}', file=sys.stderr)


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliUsageError as exc:
        _report(exc)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    configure_logging(args.log_level)
    try:
        asyncio.run(COMMANDS[args.command](args))
    except (HsiPnpError, OSError, KeyError) as exc:
        _report(exc)
        return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == '__main__':
    main()
