"""Command-line entry point: ``thztrack run|validate|sweep``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

from .config import KNOWN_KEYS, load_scenario, parse_algorithms, parse_seeds, parse_value
from .errors import ConfigError
from .simulation import emit_results, format_summary, run_scenario

log = logging.getLogger("thztrack")


def _overrides(args) -> dict:
    values = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        values[key.strip()] = parse_value(raw)
    if args.seeds is not None:
        values["run.seeds"] = list(parse_seeds(args.seeds))
    if args.algorithms is not None:
        values["run.algorithms"] = [a.value for a in parse_algorithms(args.algorithms)]
    return values


def _scenario(args, extra=None):
    values = _overrides(args)
    values.update(extra or {})
    return load_scenario(args.config, values)


def cmd_run(args) -> int:
    scenario = _scenario(args)
    t0 = time.perf_counter()
    result = run_scenario(scenario)
    log.info("simulated %d records in %.2f s", len(result.records), time.perf_counter() - t0)
    paths = emit_results(result, args.out)
    sys.stdout.write(format_summary(result))
    sys.stdout.write(f"records: {paths['records']}\n")
    return 0


def cmd_validate(args) -> int:
    scenario = _scenario(args)
    bs = ", ".join(f"({p.position[0]:.2f}, {p.position[1]:.2f}) @ {p.orientation:+.4f} rad"
                   for p in scenario.base_stations)
    print(f"ok: {len(scenario.base_stations)} BSs [{bs}]")
    print(f"    N={scenario.n_elements} V={scenario.sparsity} motion={scenario.motion.kind} "
          f"timeslots={scenario.timeslots} seeds={len(scenario.seeds)} "
          f"algorithms={','.join(a.value for a in scenario.algorithms)}")
    return 0


def cmd_sweep(args) -> int:
    if args.key not in KNOWN_KEYS:
        raise ConfigError(f"unknown key {args.key!r}")
    values = [parse_value(v) for v in args.values.split(";" if ";" in args.values else ",")]
    out = Path(args.out)
    rows = []
    for i, value in enumerate(values):
        scenario = _scenario(args, {args.key: value})
        result = run_scenario(scenario)
        emit_results(result, out / f"{i:02d}_{_slug(value)}")
        for s in result.summaries:
            rows.append((value, s))
        log.info("%s = %r done", args.key, value)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        fh.write(f"{args.key},algorithm,bs_id,mean_deafness_pct,success_probability,total_pilots\n")
        for value, s in rows:
            d = "" if math.isnan(s.mean_deafness_pct) else repr(s.mean_deafness_pct)
            fh.write(f"\"{value}\",{s.algorithm.value},{s.bs_id},{d},{s.success_probability!r},{s.total_pilots}\n")
    print(f"sweep over {args.key}: {len(values)} runs -> {out / 'sweep.csv'}")
    return 0


def _slug(value) -> str:
    return "".join(c if c.isalnum() or c in ".-" else "_" for c in str(value))[:40]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="dotted-key TOML scenario file")
    common.add_argument("--seeds", help='seed count ("100"), range ("0-9") or list ("1,4,7")')
    common.add_argument("--algorithms", help="comma list of fct, proposed-no-coop, proposed-coop")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="thztrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate a scenario and write CSV results")
    p.add_argument("--out", default="results", help="output directory or .csv path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", parents=[common], help="check a config file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", parents=[common], help="rerun while varying one config key")
    p.add_argument("--key", required=True)
    p.add_argument("--values", required=True,
                   help="comma list of values; use ';' as separator when values contain commas")
    p.add_argument("--out", default="sweep")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
