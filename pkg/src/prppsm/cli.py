"""Command-line entry point: ``prppsm simulate | gap | reproduce``."""

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from prppsm.harness.engine import read_csv, run_sweep
from prppsm.harness.gap import GapError, measure_gap
from prppsm.harness.scenario import load_scenario

log = logging.getLogger("prppsm")

# (label, baseline config, proposed config) pairs whose gap each figure reports
FIGURES = {
    "fig5": [
        ("SM vs PRPP-SM p=2", "fig5_sm", "fig5_prppsm_p2"),
        ("SM vs PRPP-SM p=4", "fig5_sm", "fig5_prppsm_p4"),
        ("SM vs PRPP-SM p=5", "fig5_sm", "fig5_prppsm_p5"),
        ("symbol-only precoding vs PRPP-SM p=5", "fig5_ablation_p5", "fig5_prppsm_p5"),
    ],
    "fig6": [
        ("PRPP 8-QAM vs PRPP-SM p=2", "fig6_prpp_p2", "fig5_prppsm_p2"),
        ("PRPP 8-QAM vs PRPP-SM p=4", "fig6_prpp_p4", "fig5_prppsm_p4"),
        ("PRPP 8-QAM vs PRPP-SM p=5", "fig6_prpp_p5", "fig5_prppsm_p5"),
    ],
    "fig7": [
        ("PRPP 8-QAM vs PRPP-SM p=10", "fig7_prpp_p10", "fig7_prppsm_p10"),
        ("PRPP 8-QAM vs PRPP-SM p=20", "fig7_prpp_p20", "fig7_prppsm_p20"),
    ],
    "fig7-full": [
        ("PRPP 8-QAM vs PRPP-SM p=70", "fig7_prpp_p70", "fig7_prppsm_p70"),
    ],
    "fig2": [
        ("PRPP p=1 vs p=50", "fig2_prpp_p1", "fig2_prpp_p50"),
    ],
}


def bundled_config(name: str) -> Path:
    return Path(str(resources.files("prppsm") / "configs" / f"{name}.yaml"))


def _progress(pt):
    log.info(
        "snr %6.2f dB  frames %7d  errors %6d  ber %.3e", pt.snr_db, pt.frames, pt.bit_errors, pt.ber
    )


def cmd_simulate(args):
    scn = load_scenario(args.config)
    log.info("scenario %s (%s), %d bpcu", scn.name, scn.digest(), scn.bpcu)
    curve = run_sweep(scn, workers=args.workers, progress=_progress)
    curve.save(args.out)
    log.info("wrote %s in %.1f s", args.out, curve.elapsed_s)
    return 0


def cmd_gap(args):
    try:
        gap = measure_gap(read_csv(args.a), read_csv(args.b), args.ber)
    except GapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{gap:.3f}")
    return 0


def cmd_reproduce(args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = {}
    for label, base, prop in FIGURES[args.figure]:
        for name in (base, prop):
            if name in curves:
                continue
            scn = load_scenario(bundled_config(name))
            if args.min_bit_errors is not None:
                scn = scn.with_changes(min_bit_errors=args.min_bit_errors)
            log.info("running %s", name)
            curve = run_sweep(scn, workers=args.workers, progress=_progress)
            curve.save(out_dir / f"{name}.csv")
            curves[name] = curve
        try:
            gap = measure_gap(curves[base], curves[prop], args.ber)
            print(f"{label}: {gap:+.2f} dB at BER {args.ber:g}")
        except GapError as exc:
            print(f"{label}: n/a ({exc})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="prppsm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario file")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True, help="CSV path; a .json sidecar is written next to it")
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=cmd_simulate)

    gap = sub.add_parser("gap", help="SNR gap (a minus b) at a target BER")
    gap.add_argument("--a", required=True)
    gap.add_argument("--b", required=True)
    gap.add_argument("--ber", type=float, default=1e-2)
    gap.set_defaults(func=cmd_gap)

    rep = sub.add_parser("reproduce", help="run the bundled scenarios of one figure")
    rep.add_argument("figure", choices=sorted(FIGURES))
    rep.add_argument("--out-dir", default="results")
    rep.add_argument("--workers", type=int, default=1)
    rep.add_argument("--ber", type=float, default=1e-2)
    rep.add_argument("--min-bit-errors", type=int, default=None)
    rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
