"""Command-line entry point: ``hybridsqueeze {params,run,sweep,verify}``.

Exit codes: 0 success, 2 config error, 3 verification failure,
4 convergence-gate failure, 1 any other simulation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import SCENARIOS, config_from_dict, load_config, _parse_truncation
from .errors import ConfigError, HybridSqueezeError

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_VERIFY, EXIT_GATE = 0, 1, 2, 3, 4


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML scenario file")
    common.add_argument("--scenario", choices=SCENARIOS, help="scenario id (overrides the config)")
    common.add_argument("--out", type=Path, help="output directory (default: ./out)")
    common.add_argument("--rwa", action="store_true", help="drop the oscillating counter-rotating terms")
    common.add_argument("--truncation", help="n_phonon,n_magnon")
    common.add_argument("--threads", type=int, help="concurrent integrations")
    common.add_argument("--seed", type=int, help="reserved; dynamics are deterministic")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hybridsqueeze", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("params", parents=[common], help="print derived parameters and regime diagnostics")
    sub.add_parser("run", parents=[common], help="run one scenario")
    sub.add_parser("sweep", parents=[common], help="run a scenario over ranged axes")
    sub.add_parser("verify", parents=[common], help="run the oracle checks")
    return p


def _config(args, default_scenario=None):
    if args.config is not None:
        cfg = load_config(args.config, args.scenario)
    else:
        sid = args.scenario or default_scenario
        if sid is None:
            raise ConfigError("give --scenario or --config", "scenario")
        cfg = config_from_dict({"scenario": sid})
    kw = {}
    if args.out is not None:
        kw["out"] = args.out
    if args.rwa:
        kw["rwa"] = True
    if args.truncation is not None:
        kw["truncation"] = _parse_truncation(args.truncation, "--truncation")
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("must be >= 1", "--threads")
        kw["threads"] = args.threads
    return replace(cfg, **kw) if kw else cfg


def _params(cfg):
    from .params import dispersive_validity, rwa_ratios
    from .runner import build_frame, regime_summary, scenario_table1
    dev = cfg.build_device()
    fp = build_frame(cfg, dev)
    rr = rwa_ratios(fp)
    out = {
        "device": {"omega_x": dev.omega_x, "omega_K": dev.omega_K, "omega_nv": dev.omega_nv,
                   "g": dev.g, "lam": dev.lam, "gamma_x": dev.gamma_x, "gamma_s": dev.gamma_s,
                   "gamma_z": dev.gamma_z, "temperature": dev.temperature},
        "frame": {k: getattr(fp, k) for k in ("omega_p", "Omega_p", "r_p", "Delta_x", "Delta_s",
                                              "Delta_K", "Delta_NV", "g_r", "g_c", "lam_r", "lam_c",
                                              "n_x", "n_xs", "n_s")},
        "regime": regime_summary(fp),
        "rwa_ratios": {"ratio_2ds": rr.ratio_2ds, "ratio_wp_ds": rr.ratio_wp_ds,
                       "ratio_2wp": rr.ratio_2wp, "minimum": rr.minimum},
        "dispersive": dispersive_validity(fp).ratios,
        "table1": scenario_table1(cfg).summary["rows"],
    }
    return out


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    from .runner import _jsonable, run, sweep, verify, write_result
    try:
        if args.command == "verify":
            out = args.out or Path("out")
            res = verify(out)
            for c in res.summary["checks"]:
                print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']} value={c['value']:.3e} "
                      f"threshold={c['threshold']:.1e}")
            print(f"verify: {'passed' if res.summary['passed'] else 'FAILED'} ({out / 'verify.json'})")
            return EXIT_OK if res.summary["passed"] else EXIT_VERIFY

        cfg = _config(args)
        if args.command == "params":
            print(json.dumps(_jsonable(_params(cfg)), indent=2, sort_keys=True))
            return EXIT_OK
        if args.command == "sweep":
            if not cfg.sweep:
                raise ConfigError("sweep needs a [sweep] section with one or two ranged axes", "sweep")
            res = sweep(cfg) if cfg.scenario not in ("fig3b", "fig3c") else run(cfg)
        else:
            res = run(cfg)
        for p in write_result(res, cfg.out):
            print(p)
        if res.gate is not None:
            g = res.gate
            shifts = ", ".join(f"{k}={v:.2e}" for k, v in g.shifts.items())
            print(f"convergence gate: {g.status}"
                  + (f" (run {g.run} at {g.truncation}: {shifts}; tol {g.tol:g})" if g.run else "")
                  + (f"; {g.reason}" if g.reason else ""))
        if res.gate_failed:
            print("error: convergence gate failed; raise the truncation", file=sys.stderr)
            return EXIT_GATE
        return EXIT_OK
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HybridSqueezeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
