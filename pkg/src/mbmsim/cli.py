"""Command-line entry points: ber, bound, diversity, dmin, selftest."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .alphabet import build_alphabet
from .channel import RngStream, complex_normal, snr_to_sigma2
from .detect import ml_detect, union_bound_bep
from .harness import SimConfig, estimate_diversity, read_curve_csv, run_ber_sweep, write_curve_csv
from .mapsel import MapIndexSet, ed_select, mi_select, min_distance_sq
from .signalset import SystemConfig, build_signal_set, rate


def _load_config(path: str) -> SimConfig:
    with open(path) as fh:
        return SimConfig.from_dict(json.load(fh))


def _system_from_args(args) -> SystemConfig:
    return SystemConfig(
        n_tu=args.n_tu, n_rf=args.n_rf, m_rf=args.m_rf, n_r=args.n_r,
        alphabet=build_alphabet(args.M, args.alphabet), M_rf=args.M_rf,
    )


def _cmd_ber(args) -> int:
    config = _load_config(args.config)
    curve = run_ber_sweep(config, workers=args.workers)
    for p in curve.points:
        print(f"snr={p.snr_db:g} dB  ber={p.ber:.6g}  "
              f"errors={p.bit_errors}  bits={p.bits_simulated}  trials={p.trials}")
    if args.output:
        write_curve_csv(curve, args.output)
        print(f"wrote {args.output}")
    return 0


def _cmd_bound(args) -> int:
    config = _system_from_args(args)
    sset = build_signal_set(config)
    for snr in args.snr_db:
        bep = union_bound_bep(sset, snr_to_sigma2(snr), config.n_r)
        print(f"snr={snr:g} dB  union_bound={bep:.6g}")
    return 0


def _cmd_diversity(args) -> int:
    curve = read_curve_csv(args.csv)
    window = (args.window[0], args.window[1]) if args.window else None
    est = estimate_diversity(curve, window)
    print(f"diversity={est.diversity:.3f}  window={est.window[0]:g}..{est.window[1]:g} dB  "
          f"points={est.n_points}  residual={est.residual:.4f}")
    return 0


def _cmd_dmin(args) -> int:
    config = _system_from_args(args)
    full_cfg = SystemConfig(n_tu=config.n_tu, n_rf=config.n_rf, m_rf=config.M_rf,
                            n_r=config.n_r, alphabet=config.alphabet)
    sset = build_signal_set(config)
    fullset = build_signal_set(full_cfg)
    full_L = MapIndexSet(tuple(tuple(range(config.N_all)) for _ in range(config.n_tu)))
    print("seed,dmin_full,dmin_mi,dmin_ed")
    for seed in range(args.seeds):
        gen = RngStream(args.master_seed, (seed,)).generator()
        Hf = complex_normal(gen, (config.n_r, config.dim_full))
        d_full = min_distance_sq(Hf, full_L, full_cfg, fullset)
        d_mi = min_distance_sq(Hf, mi_select(Hf, config), config, sset)
        d_ed = min_distance_sq(Hf, ed_select(Hf, config, sset), config, sset)
        print(f"{seed},{d_full:.6g},{d_mi:.6g},{d_ed:.6g}")
    return 0


def _cmd_selftest(args) -> int:
    failures = 0

    def check(name: str, ok: bool):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    cfg = SystemConfig(n_tu=2, n_rf=1, m_rf=2, n_r=2, alphabet=build_alphabet(2, "psk"))
    sset = build_signal_set(cfg)
    check("set size is 2^rate", len(sset) == 2 ** rate(cfg))
    check("labels round-trip", all(sset.vectors[i].label == format(i, f"0{sset.eta}b")
                                   for i in range(len(sset))))
    check("unit average energy",
          abs(np.mean(np.sum(np.abs(sset.matrix) ** 2, axis=0)) - 1.0) < 1e-12)
    gen = RngStream(0, (0,)).generator()
    H = complex_normal(gen, (cfg.n_r, cfg.dim))
    idx = 3
    res = ml_detect(H @ sset.matrix[:, idx], H, sset)
    check("noiseless detection", res.index == idx)
    bep = union_bound_bep(sset, snr_to_sigma2(10.0), cfg.n_r)
    check("bound is positive and finite", 0 < bep < np.inf)
    print(f"{failures} failure(s)")
    return 1 if failures else 0


def _add_system_args(p: argparse.ArgumentParser):
    p.add_argument("--n-tu", dest="n_tu", type=int, required=True)
    p.add_argument("--n-rf", dest="n_rf", type=int, required=True)
    p.add_argument("--m-rf", dest="m_rf", type=int, required=True)
    p.add_argument("--n-r", dest="n_r", type=int, default=1)
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--alphabet", choices=("tone", "psk", "qam"), default="psk")
    p.add_argument("--M-rf", dest="M_rf", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbmsim",
                                     description="Media-based modulation link simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ber", help="run a BER sweep from a JSON config file")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="write the curve to this CSV file")
    p.add_argument("-w", "--workers", type=int, default=1)
    p.set_defaults(func=_cmd_ber)

    p = sub.add_parser("bound", help="analytic union-bound sweep")
    _add_system_args(p)
    p.add_argument("--snr-db", dest="snr_db", type=float, nargs="+", required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("diversity", help="fit a diversity slope from a curve CSV")
    p.add_argument("csv")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("dmin", help="full/MI/ED minimum-distance triples over seeds")
    _add_system_args(p)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--master-seed", dest="master_seed", type=int, default=0)
    p.set_defaults(func=_cmd_dmin)

    p = sub.add_parser("selftest", help="run quick invariant checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
