"""Command-line entry point: ``hydrosense {simulate,sense,calibrate,study-aoa}``.

Failures print one line on stderr::

    hydrosense error kind=<kind> code=<exit code> msg="<json-escaped message>"

and exit with the code of the error class (see :mod:`hydrosense.errors`).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import calib, csisim, io, pipeline
from .arrays import DEFAULT_FC, ArrayConfig
from .config import RunConfig, load_config
from .errors import CsiFormatError, HydroSenseError
from .scene import aoa_variation_study

log = logging.getLogger("hydrosense")

IO_EXIT = 10
INTERNAL_EXIT = 1

CSI_NAME = "capture.csiw"
TRUTH_NAME = "truth.csv"
SNAPSHOT_NAME = "snapshot.npy"


def _diag(kind: str, code: int, msg: str) -> None:
    print(f"hydrosense error kind={kind} code={code} msg={json.dumps(msg)}", file=sys.stderr)


def cmd_simulate(args) -> int:
    cfg: RunConfig = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    scenario = cfg.scenario(seed)
    out = Path(args.out)
    with io.CsiWriter(out / CSI_NAME, cfg.array, cfg.sampling) as writer:
        for cap in pipeline.parallel_map(scenario.capture, range(len(scenario))):
            writer.write(cap)
    io.write_truth_csv(out / TRUTH_NAME, scenario.ground_truth())
    # pilot-only snapshot through the same array errors, for `calibrate`
    c = cfg.calibration
    snap = csisim.synth_snapshot(cfg.array, [cfg.pilot_aoa], c.snapshot_samples, c.snapshot_snr_db,
                                 errors=cfg.errors, seed=seed)
    io.save_snapshot(out / SNAPSHOT_NAME, snap)
    log.info("wrote %d captures (K=%d L=%d M=%d) to %s", cfg.sampling.n, cfg.sampling.k,
             cfg.sampling.l, cfg.array.m, out)
    return 0


def cmd_sense(args) -> int:
    cfg = load_config(args.config)
    header = io.read_header(args.csi_file)
    if header.m != cfg.array.m:
        raise CsiFormatError(f"file has M={header.m} antennas, config expects {cfg.array.m}")
    cal_path = args.calibration or cfg.calibration.path
    calibration = io.read_calibration(cal_path) if cal_path else None
    if calibration is not None and calibration.m != header.m:
        raise CsiFormatError(f"calibration has {calibration.m} antennas, file has {header.m}")

    result = pipeline.sense(lambda: io.iter_captures(args.csi_file), header.array, cfg.sense, calibration)
    log.info("theta0 (reference) %.3f deg, theta0 (MUSIC) %.3f deg, theta1 %.3f deg, alpha %.3f deg",
             cfg.sense.theta0, result.los.aoa, result.water.aoa, result.alpha)
    log.info("water-path slow-time Doppler %.4g Hz", result.water.doppler)

    time_s = np.arange(header.n) * header.delta_t_cap
    io.write_level_csv(args.out, result.level, time_s)
    if args.emit_spectrum:
        io.write_spectrum_csv(args.emit_spectrum, result.grid)
    return 0


def cmd_calibrate(args) -> int:
    snapshot = io.load_snapshot(args.snapshot)
    m = snapshot.data.shape[0]
    if args.config:
        array = load_config(args.config).array
        if array.m != m:
            raise CsiFormatError(f"snapshot has {m} antennas, config expects {array.m}")
    else:
        array = ArrayConfig(m, fc=DEFAULT_FC)
    model = calib.estimate_errors(snapshot, args.pilot_aoa, array)
    io.write_calibration(args.out, model)
    log.info("gains %s, phases %s deg", np.round(model.gains, 4), np.round(np.degrees(model.total_phases), 3))
    return 0


def cmd_study_aoa(args) -> int:
    cfg = load_config(args.config)
    st = cfg.study
    d, dv = aoa_variation_study(cfg.geometry, st.delta_w, st.distances())
    io.write_curve_csv(args.out, d, dv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hydrosense", description="Water-level sensing from bistatic LTE CSI.")
    p.add_argument("--verbose", "-v", action="store_true", help="log estimates and progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="synthesize a CSI record, its ground truth and a pilot snapshot")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int, help="override [run] seed")
    s.add_argument("--out", default=".", help="output directory")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sense", help="estimate water-level change from a CSI file")
    s.add_argument("csi_file")
    s.add_argument("--config", required=True)
    s.add_argument("--calibration", help="calibration JSON (overrides [calibration] path)")
    s.add_argument("--out", default="levels.csv", help="water-level CSV")
    s.add_argument("--emit-spectrum", metavar="CSV", help="also write the AoA/Doppler spectrum grid")
    s.set_defaults(func=cmd_sense)

    s = sub.add_parser("calibrate", help="estimate array errors from a pilot snapshot")
    s.add_argument("--snapshot", required=True, help=".npy complex array shaped (M, G)")
    s.add_argument("--pilot-aoa", type=float, required=True, help="known pilot AoA (deg)")
    s.add_argument("--config", help="take array settings from this config")
    s.add_argument("--out", default="calibration.json")
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("study-aoa", help="water-path AoA change versus Tx-Rx distance")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="aoa_study.csv")
    s.set_defaults(func=cmd_study_aoa)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        pipeline.thread_count()
        return args.func(args)
    except HydroSenseError as exc:
        _diag(exc.kind, exc.exit_code, str(exc))
        return exc.exit_code
    except OSError as exc:
        _diag("io", IO_EXIT, f"{exc.filename or ''}: {exc.strerror or exc}")
        return IO_EXIT
    except Exception as exc:  # noqa: BLE001 - last-resort one-line report
        log.debug("unhandled error", exc_info=True)
        _diag("internal", INTERNAL_EXIT, f"{type(exc).__name__}: {exc}")
        return INTERNAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
