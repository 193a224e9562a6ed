"""``nnflux`` command-line entry point.

Exit codes: 0 success, 2 invalid configuration or input files, 3 numerical
failure (a failure record is written for simulations).
"""

import argparse
import json
import logging
import sys

from . import harness
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionMismatchError,
    DivergenceError,
    FormatError,
    SimulationFailure,
)
from .flux import FluxChoice

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("nnflux")


def build_parser():
    p = argparse.ArgumentParser(prog="nnflux", description="Neural Godunov-flux surrogates for finite volumes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="config JSON path or preset name")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--no-figures", action="store_true", help="skip PNG figures")

    common(sub.add_parser("gen-data", help="sample Riemann data and Godunov targets"))
    sp = sub.add_parser("train", help="train surrogate models")
    common(sp)
    sp.add_argument("--model", choices=harness.MODEL_NAMES, help="train only this model")
    common(sub.add_parser("eval-apriori", help="flux errors on the test and stress sets"))
    sp = sub.add_parser("simulate", help="run a finite-volume simulation")
    common(sp)
    sp.add_argument("--flux", choices=[c.value for c in FluxChoice], help="override simulation.flux")
    sp.add_argument("--model", dest="model_path", help="surrogate model file for vnn/bfnn fluxes")
    sp = sub.add_parser("compare", help="per-cell differences between two simulation outputs")
    sp.add_argument("run_a")
    sp.add_argument("run_b", help="reference run")
    common(sp, config_required=False)
    common(sub.add_parser("gradcheck", help="backprop versus finite differences"), config_required=False)
    sub.add_parser("presets", help="list shipped preset configs")
    return p


def _config(args):
    if getattr(args, "config", None) is None:
        cfg = {"seed": args.seed if args.seed is not None else 0}
    else:
        cfg = harness.with_seed(harness.load_config(args.config), args.seed)
    if getattr(args, "no_figures", False):
        cfg["figures"] = False
    return cfg


def run(args):
    if args.command == "presets":
        print("\n".join(harness.preset_names()))
        return EXIT_OK
    cfg = _config(args)
    if args.command == "gen-data":
        manifest = harness.cmd_gen_data(cfg, args.out)
        for name, f in manifest["files"].items():
            print(f"{name},{f['rows']},{f['path']}")
    elif args.command == "train":
        summary = harness.cmd_train(cfg, args.out, args.model)
        for name, s in summary.items():
            print(f"{name},final_loss,{s['final_loss']:.6e}")
    elif args.command == "eval-apriori":
        report = harness.cmd_eval_apriori(cfg, args.out)
        for name, err in report.relative_l1.items():
            print(f"{name},rel_l1,{err:.6e}")
    elif args.command == "simulate":
        try:
            _, record = harness.cmd_simulate(cfg, args.out, args.flux, args.model_path)
        except SimulationFailure as exc:
            print(json.dumps(exc.record()), file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"{record['flux']},steps,{record['steps']}")
    elif args.command == "compare":
        rows = harness.cmd_compare(args.run_a, args.run_b, args.out, cfg.get("figures", True))
        for r in rows:
            print(f"{r['time']:g},{r['component']},l1,{r['l1']:.6e},rel_l1,{r['rel_l1']:.6e},linf,{r['linf']:.6e}")
    elif args.command == "gradcheck":
        worst = harness.cmd_gradcheck(cfg, args.out)
        print(f"gradcheck,max_rel_err,{worst:.3e}")
        return EXIT_OK if worst < 1e-5 else EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except (ConfigError, FormatError, DimensionMismatchError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DivergenceError, ConvergenceError, SimulationFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
