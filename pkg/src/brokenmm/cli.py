"""Command-line front end.

Subcommands::

    brokenmm mul A.bmat B.bmat --algo {naive,strassen,sketch} --out C.bmat
    brokenmm witness A.bmat B.bmat --out W.wmat
    brokenmm verify A.bmat B.bmat [--product C.bmat] [--witness W.wmat]
    brokenmm stats --dims D1 D2 D3 [--s S] [--b B] [--delta D]
    brokenmm bench --s-range 0:4 --b 4 [--out bench.csv]

Diagnostics go to stderr; matrix output goes to ``--out`` (written atomically)
or stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .gfmat import BitMatrix, InstanceStats, bool_mul_naive, bool_mul_strassen, format_bmat, parse_bmat
from .pseudomul import GF2, CounterReport, PseudoParams, pseudo_product
from .sketch import SEED_LIMIT, SketchConfig, default_delta, run_sketch
from .witness import format_wmat, parse_wmat, wbmm_run

DEFAULT_SEED = 0
DEFAULT_B = 64


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    algo: str = "sketch"
    seed: int = DEFAULT_SEED
    b: int = DEFAULT_B
    delta: float | None = None
    trials: int = 1
    s_range: tuple[int, int] = (0, 4)
    product: str | None = None
    witness: str | None = None
    dims: tuple[int, int, int] | None = None
    s: int | None = None

    def validate(self) -> None:
        if not 0 <= self.seed < SEED_LIMIT:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if self.b < 1:
            raise UsageError("--b must be positive")
        if self.delta is not None and not 0 < self.delta < 1:
            raise UsageError("--delta must lie in (0, 1)")
        if self.trials < 1:
            raise UsageError("--trials must be positive")
        lo, hi = self.s_range
        if lo < 0 or hi < lo:
            raise UsageError("--s-range must be LO:HI with 0 <= LO <= HI")
        if self.s is not None and self.s < 0:
            raise UsageError("--s must be non-negative")
        if self.dims is not None and min(self.dims) < 1:
            raise UsageError("--dims must be positive")


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected LO:HI") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brokenmm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, algo, default):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--b", type=int, default=DEFAULT_B, help="base block size")
        p.add_argument("--delta", type=float, default=None, help="per-entry failure target (default 1/psi3)")
        p.add_argument("--out", default=None)
        p.add_argument("--algo", choices=algo, default=default)

    mul = sub.add_parser("mul", help="Boolean product of two BMAT files")
    mul.add_argument("inputs", nargs=2, metavar="BMAT")
    common(mul, ["naive", "strassen", "sketch"], "sketch")

    wit = sub.add_parser("witness", help="witness matrix of two BMAT files")
    wit.add_argument("inputs", nargs=2, metavar="BMAT")
    common(wit, ["auto", "naive", "sketch"], "auto")

    ver = sub.add_parser("verify", help="check a product and/or witness file against the naive oracle")
    ver.add_argument("inputs", nargs=2, metavar="BMAT")
    ver.add_argument("--product", default=None, help="BMAT file claimed to be A B")
    ver.add_argument("--witness", default=None, help="WMAT file claimed to witness A B")

    st = sub.add_parser("stats", help="parameter and bound report")
    st.add_argument("--dims", type=int, nargs=3, required=True, metavar=("D1", "D2", "D3"))
    st.add_argument("--s", type=int, default=None, help="depth (default: select_s)")
    st.add_argument("--b", type=int, default=DEFAULT_B)
    st.add_argument("--delta", type=float, default=None)

    bench = sub.add_parser("bench", help="pseudo-product counters and timings as CSV")
    bench.add_argument("--s-range", type=_parse_range, default=(0, 4))
    bench.add_argument("--b", type=int, default=DEFAULT_B)
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench.add_argument("--trials", type=int, default=1, help="timing repetitions per depth")
    bench.add_argument("--out", default=None)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand)
    for name in ("inputs", "out", "algo", "seed", "b", "delta", "trials", "s_range",
                 "product", "witness", "s"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if getattr(ns, "dims", None) is not None:
        cfg.dims = tuple(ns.dims)
    cfg.validate()
    return cfg


# -- I/O helpers -----------------------------------------------------------

def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _read(path: str, parser):
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return parser(text)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_pair(cfg: RunConfig) -> tuple[BitMatrix, BitMatrix, InstanceStats]:
    A = _read(cfg.inputs[0], parse_bmat)
    B = _read(cfg.inputs[1], parse_bmat)
    if A.cols != B.rows:
        raise UsageError(f"dimension mismatch: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    return A, B, InstanceStats.of(A, B)


def _pad(M: BitMatrix, n: int) -> BitMatrix:
    arr = np.zeros((n, n), dtype=np.uint8)
    arr[:M.rows, :M.cols] = M.to_array()
    return BitMatrix.from_array(arr)


def strassen_product(A: BitMatrix, B: BitMatrix, b: int) -> BitMatrix:
    """Exact Boolean product via integer Strassen on zero-padded ``base * 2^t`` squares."""
    n = max(A.rows, A.cols, B.cols)
    base = min(b, n)
    t = max(0, math.ceil(math.log2(n / base)))
    size = base << t
    C = bool_mul_strassen(_pad(A, size), _pad(B, size), base)
    return BitMatrix.from_array(C.to_array()[:A.rows, :B.cols])


# -- subcommands -----------------------------------------------------------

def cmd_mul(cfg: RunConfig) -> int:
    A, B, stats = _load_pair(cfg)
    if cfg.algo == "naive":
        C = bool_mul_naive(A, B)
        _info("algo = naive")
    elif cfg.algo == "strassen":
        C = strassen_product(A, B, cfg.b)
        _info("algo = strassen")
    else:
        delta = cfg.delta if cfg.delta is not None else default_delta(stats)
        s = analysis.select_s(stats, cfg.b, delta)
        res = run_sketch(A, B, SketchConfig(PseudoParams(s, cfg.b), cfg.seed, delta))
        C = res.product
        _info("algo = sketch")
        _info(f"s = {s}")
        _info(f"m = {res.params.m}")
        _info(f"base_mults = {res.counters.base_mults}")
        _info(f"block_adds = {res.counters.block_adds}")
        skew = analysis.check_skew(res.params, stats)
        if skew.warn:
            _info(f"warning: skew ratios {skew.ratio_psi1:.3g}, {skew.ratio_psi2:.3g} "
                  f"exceed {analysis.SKEW_THRESHOLD}")
    _emit(cfg, format_bmat(C))
    return 0


def cmd_witness(cfg: RunConfig) -> int:
    A, B, _ = _load_pair(cfg)
    res = wbmm_run(A, B, seed=cfg.seed, b=cfg.b, delta=cfg.delta, algo=cfg.algo)
    _info(f"s_max = {res.s_max}")
    for s, t in res.trials.items():
        _info(f"trials[s={s}] = {t}")
    _info(f"estimated_entries = {res.estimated_entries}")
    _info(f"fallback_probes = {res.probes}")
    _info(f"base_mults = {res.counters.base_mults}")
    _emit(cfg, format_wmat(res.witness))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    A, B, _ = _load_pair(cfg)
    C = bool_mul_naive(A, B)
    lines = []
    failed = False
    if cfg.product is None and cfg.witness is None:
        raise UsageError("verify needs --product and/or --witness")
    if cfg.product is not None:
        P = _read(cfg.product, parse_bmat)
        if P.shape != C.shape:
            raise UsageError(f"product is {P.rows}x{P.cols}, expected {C.rows}x{C.cols}")
        p_bits, c_bits = P.to_array().astype(bool), C.to_array().astype(bool)
        fp = int((p_bits & ~c_bits).sum())
        fn = int((c_bits & ~p_bits).sum())
        lines += [f"false_positives = {fp}", f"false_negatives = {fn}"]
        failed |= fp > 0
    if cfg.witness is not None:
        W = _read(cfg.witness, parse_wmat)
        if W.shape != C.shape:
            raise UsageError(f"witness is {W.shape[0]}x{W.shape[1]}, expected {C.rows}x{C.cols}")
        bad = W.violations(A, B)
        missing = int((C.to_array().astype(bool) & ~W.support()).sum())
        lines += [f"witness_violations = {bad}", f"witness_missing = {missing}"]
        failed |= bad > 0
    lines.append(f"status = {'FAIL' if failed else 'OK'}")
    print("\n".join(lines))
    return 1 if failed else 0


def cmd_stats(cfg: RunConfig) -> int:
    if cfg.dims is None:
        raise UsageError("stats needs --dims D1 D2 D3")
    stats = InstanceStats(*cfg.dims)
    rep = analysis.report(stats, cfg.s, cfg.b, cfg.delta)
    print("\n".join(f"{k} = {v}" for k, v in rep.items()))
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    lo, hi = cfg.s_range
    rng = np.random.default_rng(cfg.seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "m", "base_mults", "block_adds", "wall_time"])
    ok = True
    for s in range(lo, hi + 1):
        p = PseudoParams(s, cfg.b)
        A = rng.integers(0, 2, (p.m, p.m), dtype=np.uint8)
        B = rng.integers(0, 2, (p.m, p.m), dtype=np.uint8)
        best = math.inf
        counters = CounterReport()
        for _ in range(cfg.trials):
            t0 = time.perf_counter()
            _, counters = pseudo_product(A, B, p, GF2)
            best = min(best, time.perf_counter() - t0)
        if counters != CounterReport.expected(s):
            ok = False
            _info(f"counter mismatch at s={s}: {counters}")
        writer.writerow([s, p.m, counters.base_mults, counters.block_adds, f"{best:.6f}"])
    _emit(cfg, buf.getvalue())
    return 0 if ok else 1


COMMANDS = {
    "mul": cmd_mul,
    "witness": cmd_witness,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"brokenmm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
