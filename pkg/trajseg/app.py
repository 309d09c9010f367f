"""
trajseg command line
====================
Subcommands:
    synth          generate labeled synthetic trajectories
    error-signal   per-point interpolation error
    make-training  labeled q-windows for the classifier
    train          fit a WS-II forest and save it
    segment        segment trajectories with WS-II or a baseline
    evaluate       k-fold protocol for one algorithm
    compare        k-fold protocol for several algorithms + Mann-Whitney U

Exit codes: 0 success, 1 validation or usage error, 2 internal error.
Every output path is given explicitly; nothing is written implicitly.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError as PydanticValidationError

from trajseg.config import (
    ALGORITHM_NAMES,
    DEFAULT_FOLDS,
    DEFAULT_KERNEL,
    DEFAULT_Q,
    DEFAULT_SEED,
    DEFAULT_WINDOW,
    RunConfig,
    setup_logging,
)
from trajseg.errors import ModelMismatchError, UsageError, ValidationError
from trajseg.generators.synthetic_generator import SynthSpec, generate_synthetic
from trajseg.models.forest import ForestParams
from trajseg.models.trajectory import KernelKind
from trajseg.services.algorithm_service import build_algorithm
from trajseg.services.baseline_service import (
    CbSmotParams,
    OwsParams,
    SpdParams,
    cbsmot_segment,
    ows_segment,
    spd_segment,
)
from trajseg.services.error_signal_service import error_signals
from trajseg.services.evaluation_service import compare
from trajseg.services.segmenter_service import segment_many, train_model
from trajseg.services.training_service import build_training_dataset
from trajseg.storage.csv_storage import (
    load_trajectories,
    write_boxplot,
    write_error_signals,
    write_segments,
    write_training_set,
    write_trajectories,
)
from trajseg.storage.model_storage import load_model, save_model
from trajseg.storage.report_storage import write_report

logger = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().strip()}")


def _int_range(text: str) -> Tuple[int, int]:
    try:
        low, high = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX integers, got '{text}'")
    return low, high


def _optional_depth(text: str) -> Optional[int]:
    if text.lower() in ("none", "unbounded"):
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'none', got '{text}'")


def _kernel(text: str) -> KernelKind:
    try:
        return KernelKind.parse(text)
    except ValidationError as e:
        raise argparse.ArgumentTypeError(str(e))


def _report(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _forest_params(args: argparse.Namespace) -> ForestParams:
    return ForestParams(
        n_trees=args.n_trees,
        max_depth=args.max_depth,
        min_samples_leaf=args.min_samples_leaf,
        features_per_split=args.features_per_split,
        bootstrap=not args.no_bootstrap,
        balanced=not args.no_balance,
        threshold=args.threshold,
    )


def _config(args: argparse.Namespace, **overrides) -> RunConfig:
    fields = {
        "w": getattr(args, "w", None),
        "q": getattr(args, "q", None),
        "kernel": getattr(args, "kernel", None),
        "seed": args.seed,
        "folds": getattr(args, "folds", None),
        "standardize": getattr(args, "standardize", None),
        "jobs": args.jobs,
        "input_path": getattr(args, "input", None),
        "output_path": getattr(args, "out", None),
    }
    if hasattr(args, "n_trees"):
        fields["forest"] = _forest_params(args)
    fields.update(overrides)
    return RunConfig(**{key: value for key, value in fields.items() if value is not None})


def cmd_synth(args: argparse.Namespace) -> None:
    spec = SynthSpec(
        seed=args.seed,
        n_trajectories=args.n_trajectories,
        points_per_segment=args.points_per_segment,
        segments_per_trajectory=args.segments_per_trajectory,
        gps_noise_m=args.gps_noise,
        trajectories_per_object=args.trajectories_per_object,
    )
    trajectories = generate_synthetic(spec)
    write_trajectories(args.out, trajectories)
    _report(args, f"✅ {len(trajectories)} synthetic trajectories written to {args.out}")


def cmd_error_signal(args: argparse.Namespace) -> None:
    config = _config(args)
    signals = error_signals(load_trajectories(config.input_path), config.w, config.kernel)
    write_error_signals(config.output_path, signals)
    short = sum(1 for s in signals if s.warning)
    if short:
        _report(args, f"⚠️ {short} trajectories too short for w={config.w}")
    _report(args, f"✅ Error signals for {len(signals)} trajectories written to {config.output_path}")


def cmd_make_training(args: argparse.Namespace) -> None:
    config = _config(args)
    samples = build_training_dataset(load_trajectories(config.input_path), config.w, config.q, config.kernel)
    write_training_set(config.output_path, samples, config.q)
    _report(args, f"✅ {len(samples)} training samples written to {config.output_path}")


def cmd_train(args: argparse.Namespace) -> None:
    config = _config(args, output_path=args.model)
    model = train_model(
        load_trajectories(config.input_path),
        config.w,
        config.q,
        config.kernel,
        hp=config.forest,
        seed=config.seed,
        standardize=config.standardize,
        n_jobs=config.jobs,
    )
    save_model(config.output_path, model)
    _report(args, f"✅ {model.n_trees}-tree model written to {config.output_path}")


def _segment_wsii(args: argparse.Namespace, trajectories):
    if not args.model:
        raise UsageError("segment --algorithm wsii requires --model")
    model = load_model(args.model)
    q = args.q if args.q is not None else model.q
    if q != model.q:
        raise ModelMismatchError(f"Model was trained with q={model.q}, got --q {q}")
    w = args.w if args.w is not None else (model.w or DEFAULT_WINDOW)
    kernel = args.kernel if args.kernel is not None else (model.kernel or DEFAULT_KERNEL)
    config = _config(args, w=w, q=q, kernel=kernel)
    return segment_many(trajectories, model, config.w, config.q, config.kernel)


def cmd_segment(args: argparse.Namespace) -> None:
    trajectories = load_trajectories(args.input)
    ordered = sorted(trajectories, key=lambda t: t.id)
    if args.algorithm == "wsii":
        results = _segment_wsii(args, trajectories)
    elif args.algorithm == "ows":
        params = OwsParams(w=args.w or DEFAULT_WINDOW, kernel=args.kernel or DEFAULT_KERNEL, epsilon=args.epsilon)
        results = [ows_segment(traj, params) for traj in ordered]
    elif args.algorithm == "spd":
        params = SpdParams(theta_d=args.theta_d, theta_t=args.theta_t)
        results = [spd_segment(traj, params) for traj in ordered]
    else:
        params = CbSmotParams(eps=args.eps, min_time=args.min_time)
        results = [cbsmot_segment(traj, params) for traj in ordered]
    write_segments(args.out, results, trajectories)
    n_segments = sum(len(r.segments) for r in results)
    _report(args, f"✅ {n_segments} segments over {len(results)} trajectories written to {args.out}")


def _run_protocol(args: argparse.Namespace, names: List[str]) -> None:
    config = _config(args, algorithms=names)
    dataset = load_trajectories(config.input_path)
    options = {
        "w": config.w,
        "q": config.q,
        "kernel": config.kernel,
        "hp": config.forest,
        "standardize": config.standardize,
        "n_jobs": config.jobs,
        "kernels": tuple(KernelKind) if args.ows_all_kernels else None,
    }
    algorithms = [build_algorithm(name, **options) for name in config.algorithms]
    report = compare(dataset, algorithms, config.folds, config.seed)
    write_report(config.output_path, report)
    if args.boxplot_csv:
        write_boxplot(args.boxplot_csv, report.reports)
    for result in report.reports:
        _report(args, f"📊 {result.algorithm}: H = {result.mean:.4f} ± {result.std:.4f}")
    for test in report.pairwise:
        _report(args, f"   {test.a} vs {test.b}: U = {test.u:g}, p = {test.p_value:.4g}")
    _report(args, f"✅ Report written to {config.output_path}")


def cmd_evaluate(args: argparse.Namespace) -> None:
    _run_protocol(args, [args.algorithm])


def cmd_compare(args: argparse.Namespace) -> None:
    _run_protocol(args, args.algorithms)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common_flags() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="single seed for all randomness")
    common.add_argument("--jobs", type=int, default=1, help="trees trained concurrently")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")
    return common


def _signal_flags(parser: argparse.ArgumentParser, defaults: bool = True) -> None:
    parser.add_argument("--w", type=int, default=DEFAULT_WINDOW if defaults else None, help="error-signal window (odd, >= 7)")
    parser.add_argument("--kernel", type=_kernel, default=DEFAULT_KERNEL if defaults else None,
                        help="random-walk | kinematic | linear | cubic")


def _forest_flags(parser: argparse.ArgumentParser) -> None:
    defaults = ForestParams()
    group = parser.add_argument_group("forest")
    group.add_argument("--n-trees", type=int, default=defaults.n_trees)
    group.add_argument("--max-depth", type=_optional_depth, default=defaults.max_depth)
    group.add_argument("--min-samples-leaf", type=int, default=defaults.min_samples_leaf)
    group.add_argument("--features-per-split", type=int, default=None, help="default ceil(sqrt(q))")
    group.add_argument("--no-bootstrap", action="store_true")
    group.add_argument("--no-balance", action="store_true", help="plain bootstrap instead of class-balanced")
    group.add_argument("--threshold", type=float, default=defaults.threshold)
    group.add_argument("--standardize", action="store_true", help="z-score error windows before training")


def _protocol_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True)
    parser.add_argument("--out", required=True, help="metrics report (JSON)")
    parser.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    parser.add_argument("--q", type=int, default=DEFAULT_Q)
    parser.add_argument("--boxplot-csv", default=None, help="per-fold harmonic means for plotting")
    parser.add_argument("--ows-all-kernels", action="store_true", help="tune OWS over all four kernels")
    _signal_flags(parser)
    _forest_flags(parser)


def build_parser() -> CliParser:
    common = _common_flags()
    parser = CliParser(prog="trajseg", description="Supervised trajectory segmentation (WS-II) and baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate labeled synthetic trajectories")
    synth_defaults = SynthSpec()
    p.add_argument("--out", required=True)
    p.add_argument("--n-trajectories", type=int, default=synth_defaults.n_trajectories)
    p.add_argument("--points-per-segment", type=_int_range, default=synth_defaults.points_per_segment)
    p.add_argument("--segments-per-trajectory", type=_int_range, default=synth_defaults.segments_per_trajectory)
    p.add_argument("--gps-noise", type=float, default=synth_defaults.gps_noise_m)
    p.add_argument("--trajectories-per-object", type=int, default=synth_defaults.trajectories_per_object)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("error-signal", parents=[common], help="per-point interpolation error")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _signal_flags(p)
    p.set_defaults(handler=cmd_error_signal)

    p = sub.add_parser("make-training", parents=[common], help="labeled q-windows")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--q", type=int, default=DEFAULT_Q)
    _signal_flags(p)
    p.set_defaults(handler=cmd_make_training)

    p = sub.add_parser("train", parents=[common], help="fit and save a WS-II forest")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--q", type=int, default=DEFAULT_Q)
    _signal_flags(p)
    _forest_flags(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("segment", parents=[common], help="segment trajectories")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="segments CSV")
    p.add_argument("--algorithm", choices=ALGORITHM_NAMES, default="wsii")
    p.add_argument("--model", default=None, help="wsii: model file from `train`")
    p.add_argument("--q", type=int, default=None, help="wsii: must match the model")
    _signal_flags(p, defaults=False)
    p.add_argument("--epsilon", type=float, default=None, help="ows: error threshold (m)")
    p.add_argument("--theta-d", type=float, default=None, help="spd: distance threshold (m)")
    p.add_argument("--theta-t", type=float, default=None, help="spd: time threshold (s)")
    p.add_argument("--eps", type=float, default=None, help="cbsmot: neighborhood radius (m)")
    p.add_argument("--min-time", type=float, default=None, help="cbsmot: minimum stop duration (s)")
    p.set_defaults(handler=cmd_segment)

    p = sub.add_parser("evaluate", parents=[common], help="k-fold protocol for one algorithm")
    p.add_argument("--algorithm", choices=ALGORITHM_NAMES, default="wsii")
    _protocol_flags(p)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("compare", parents=[common], help="k-fold protocol for several algorithms")
    p.add_argument("--algorithms", type=lambda s: [n.strip() for n in s.split(",") if n.strip()],
                   default=list(ALGORITHM_NAMES), help="comma-separated, e.g. wsii,ows,spd,cbsmot")
    _protocol_flags(p)
    p.set_defaults(handler=cmd_compare)

    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and run one subcommand.

    Returns:
        0 on success, 1 on validation/usage errors, 2 on internal errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    setup_logging(verbose=args.verbose, quiet=args.quiet)
    try:
        args.handler(args)
    except (ValidationError, UsageError, PydanticValidationError) as e:
        logger.error(f"❌ {e}")
        return 1
    except Exception:
        logger.exception("❌ Internal error")
        return 2
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
