"""Command-line driver: one config file, a few overrides, one subcommand per stage."""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from scenegen.config import PipelineConfig, load_config
from scenegen.errors import SceneGenError
from scenegen.utils.monitoring import configure_logging, init_error_reporting, report_exception
from scenegen.workflows import (
    CalibrationWorkflow,
    GenerationWorkflow,
    PipelineWorkflow,
    ProfilingWorkflow,
    ReconstructionWorkflow,
    Workflow,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenegen", description="Multiview driving-scene generation and 3D reconstruction")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (schema_version 1)")
    common.add_argument("--env-file", help="dotenv file with SCENEGEN_* overrides")
    common.add_argument("--seed", type=int, help="override the run seed")
    common.add_argument("--threshold", type=float, help="override cache.threshold")
    common.add_argument("--output", help="override output_dir")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="sample multiview frames")
    reconstruct = sub.add_parser("reconstruct", parents=[common], help="lift frames to per-timestep gaussians and score them")
    reconstruct.add_argument("--frames", help="frame directory (default: <output>/frames)")
    pipeline = sub.add_parser("pipeline", parents=[common], help="generate, reconstruct and evaluate")
    pipeline.add_argument("--reuse-frames", action="store_true", help="skip generation when frames already exist")
    calibrate = sub.add_parser("calibrate", parents=[common], help="fit the cache rescale polynomial")
    calibrate.add_argument("--trace", help="fit from an existing calibration trace instead of sampling")
    sub.add_parser("profile", parents=[common], help="per-kind attention timing and range statistics")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    return {"seed": args.seed, "cache.threshold": args.threshold, "output_dir": args.output}


WORKFLOWS: Dict[str, Callable[[PipelineConfig, argparse.Namespace], Workflow]] = {
    "generate": lambda cfg, args: GenerationWorkflow(cfg),
    "reconstruct": lambda cfg, args: ReconstructionWorkflow(cfg, frames_dir=args.frames),
    "pipeline": lambda cfg, args: PipelineWorkflow(cfg, reuse_frames=args.reuse_frames),
    "calibrate": lambda cfg, args: CalibrationWorkflow(cfg, trace_file=args.trace),
    "profile": lambda cfg, args: ProfilingWorkflow(cfg),
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, overrides=_overrides(args), env_file=args.env_file)
        configure_logging(config.log_level)
        init_error_reporting()
        report = WORKFLOWS[args.command](config, args).run()
    except SceneGenError as exc:
        print(f"scenegen {args.command}: {exc}", file=sys.stderr)
        if exc.exit_code == EXIT_RUNTIME:
            report_exception(exc, command=args.command)
        return exc.exit_code
    except Exception as exc:
        logger.exception("unexpected failure")
        report_exception(exc, command=args.command)
        print(f"scenegen {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    logger.info("%s finished: %s", args.command, ", ".join(sorted(report.sections)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
