"""Command line front end: simulate | process | compare | report | sweep."""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List
from typing import Optional

from .aspc import aspc_cube
from .backend import JoblibBackend
from .backend import use_backend
from .config import RunConfig
from .config import load_config
from .cubefile import read_cube
from .cubefile import write_cube
from .errors import IoError
from .errors import ProcessingError
from .metrics import compare_pipelines
from .metrics import measure_image
from .metrics import phase_noise_sweep
from .output import output_path
from .output import write_db_csv
from .output import write_deltas
from .output import write_estimates_csv
from .output import write_pgm
from .output import write_report
from .output import write_sweep_csv
from .sar import get_pipeline
from .simulator import simulate_cube

logger = logging.getLogger(__name__)

DEFAULT_SIGMAS = [0.01, 0.02, 0.04, 0.08, 0.16]


def _output_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc.strerror}", payload={"path": str(path)})
    if not os.access(path, os.W_OK):
        raise IoError(f"{path} is not writable", payload={"path": str(path)})
    return path


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    p = cfg.validated()
    cube = simulate_cube(p, cfg.scene, cfg.leakage, cfg.noise_sigma, cfg.seed)
    out = Path(args.out) if args.out else _output_dir(cfg) / f"cube_seed{cfg.seed}.bin"
    size = write_cube(out, cube)
    print(f"N={cube.n} M={cube.m} bytes={size} path={out}")
    return 0


def cmd_process(args: argparse.Namespace, cfg: RunConfig) -> int:
    cube = read_cube(args.cube, cfg.radar)
    p = cube.params_snapshot

    results = []
    for method in cfg.methods:
        img = get_pipeline(method)(p).run(cube)
        results.append((method, img, measure_image(img, cfg.scene, p)))

    out = _output_dir(cfg)
    for method, img, report in results:
        write_pgm(output_path(out, "image", method, cfg.seed, "pgm"), img)
        write_db_csv(output_path(out, "image", method, cfg.seed, "csv"), img)
        write_report(output_path(out, "report", method, cfg.seed, "txt"), report, cfg.seed)
    return 0


def cmd_compare(args: argparse.Namespace, cfg: RunConfig) -> int:
    cube = read_cube(args.cube, cfg.radar)
    conventional, proposed, deltas = compare_pipelines(cube, cube.params_snapshot, cfg.scene)

    out = _output_dir(cfg)
    for report in (conventional, proposed):
        method = report.method_tag.value
        write_report(output_path(out, "report", method, cfg.seed, "txt"), report, cfg.seed)
    write_deltas(output_path(out, "compare", "delta", cfg.seed, "txt"), deltas)

    for key, value in deltas.items():
        print(f"delta {key} = {value:.3f}")

    if cfg.leakage.has_phase_noise and not proposed.noise_floor_db <= conventional.noise_floor_db:
        logger.error(
            f"proposed noise floor {proposed.noise_floor_db:.2f} dB is above "
            f"the conventional {conventional.noise_floor_db:.2f} dB"
        )
        return 1
    return 0


def cmd_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    cube = read_cube(args.cube, cfg.radar)
    _, estimates = aspc_cube(cube, cube.params_snapshot)
    path = output_path(_output_dir(cfg), "estimates", "proposed", cfg.seed, "csv")
    write_estimates_csv(path, estimates)
    detected = sum(1 for e in estimates if e.detected)
    print(f"sweeps={len(estimates)} detected={detected} path={path}")
    return 0


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    seeds = [cfg.seed + i for i in range(args.seeds)]
    result = phase_noise_sweep(
        cfg.validated(), cfg.scene, cfg.leakage, args.sigmas, cfg.noise_sigma, seeds
    )
    path = output_path(_output_dir(cfg), "sweep", "phase_noise", cfg.seed, "csv")
    write_sweep_csv(path, result, "sigma_rad")
    print(f"spearman_rho={result.spearman_rho:.3f} path={path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aspc-sar", description="FMCW SAR simulation and A-SPC leakage mitigation"
    )
    parser.add_argument("--config", help="YAML run config (defaults when omitted)")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--verbose", action="store_true", help="debug logging")

    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="simulate a raw cube")
    simulate.add_argument("--out", help="cube path (default: <output_dir>/cube_seed<seed>.bin)")
    simulate.set_defaults(func=cmd_simulate)

    for name, func, help_text in (
        ("process", cmd_process, "focus a cube with the configured method(s)"),
        ("compare", cmd_compare, "run both pipelines and report the deltas"),
        ("report", cmd_report, "write the per-sweep leakage estimates"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("cube", help="raw cube file")
        cmd.set_defaults(func=func)

    sweep = sub.add_parser("sweep", help="noise floor delta versus phase-noise RMS")
    sweep.add_argument("--sigmas", type=float, nargs="+", default=DEFAULT_SIGMAS)
    sweep.add_argument("--seeds", type=int, default=5, help="seeds per level")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.threads > 1:
            use_backend(JoblibBackend(args.threads))
        return args.func(args, cfg)
    except ProcessingError as exc:
        logger.error(f"{exc.__class__.__name__}: {exc.to_dict()}")
        return exc.exit_code
    finally:
        use_backend(None)


def main() -> None:
    sys.exit(run())
