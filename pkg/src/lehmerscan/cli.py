"""Command-line pipeline: scan | ingest | detect | analyze | phase-grid | report.

Configuration comes from an optional key=value file plus flag overrides.
All numeric output is fixed 25-significant-digit lowercase scientific
notation so repeated runs are byte-identical; every file is written via a
temp-file-plus-rename so a killed run never leaves a partial file under the
final name.

Exit codes: 0 success, 1 usage error, 2 numerical-certification failure,
3 data-validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from multiprocessing import get_context
from pathlib import Path

import mpmath as mp

from . import analysis as an_mod
from .cache import ZeroCache, cache_path, ingest, load_cache, sci25
from .config import ConfigError, ScanConfig, load_config_file, scan_config_from_mapping
from .errors import (
    CentralZeroMultiplicityError,
    CentralZeroNotFoundError,
    DataError,
    NumericalError,
    ToolkitError,
)
from .lehmer import BORDERLINE, NO, YES, ZeroPair, classify_pair, dbn_bound, neg_pxi_prime
from .zeroscan import ZetaZero, rvm_main_term, scan_zeros
from .zprime import central_zero, find_zprime_zeros
from .bignum import BigReal

LEHMER_FLAG = {YES: 1, NO: 0, BORDERLINE: 2, None: -1}
FLAG_LEHMER = {1: YES, 0: NO, 2: BORDERLINE, -1: None}

PAIR_CSV_COLUMNS = (
    "index_lower,gamma_lower,gamma_upper,delta,g_truncated,g_tail_upper,"
    "g_window,lehmer_flag,strong_flag,dbn_lower_bound,pxi_lower,pxi_upper,strong_lhs"
)

ANALYSIS_CSV_COLUMNS = (
    "gamma_lower,gamma_upper,t0,X,Y,log_scale,x,y,delta_scaled,r,"
    "central_imag,central_real,central_real_unsimplified,stirling,"
    "rest_imag,rest_real,window_residual,strong_lhs,lehmer_flag,strong_flag"
)


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(x) -> str:
    if x is None:
        return ""
    v = x.value if isinstance(x, BigReal) else mp.mpf(x)
    return sci25(v)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def _margin(cfg: ScanConfig) -> float:
    import math

    t_ref = max(cfg.t_hi, 20.0)
    return cfg.g_window_gaps * 2 * math.pi / math.log(t_ref / (2 * math.pi))


def cmd_scan(cfg: ScanConfig) -> int:
    cfg.validate()
    ecfg = cfg.eval_config()
    margin = _margin(cfg)
    lo = max(cfg.t_lo - margin, 10.5)
    hi = cfg.t_hi + margin
    anchored = "exact" if lo < 14 else "inferred"
    anchor = 1 if lo < 14 else None
    if anchor is None:
        # anchor the first index from the counting main term, flagged inferred
        with ecfg.workprec():
            anchor = int(mp.nint(rvm_main_term(lo))) + 1
    zeros, report = scan_zeros(lo, hi, ecfg, workers=cfg.workers, anchor_hint=anchor if anchored == "inferred" else None)
    if anchored == "exact":
        zeros = [ZetaZero(gamma=z.gamma, residual=z.residual, index=i + 1,
                          provenance=z.provenance) for i, z in enumerate(zeros)]
    print(report)
    zcache = ZeroCache(kind="zeta", interval=(lo, hi), precision=cfg.target_digits,
                       entries=zeros, anchored=anchored)
    zpath = zcache.write(cache_path(cfg.cache_dir, "zeta"))
    print(f"wrote {zpath} ({len(zeros)} zeros)")

    zp = find_zprime_zeros(lo, hi, ecfg, sigma_max=cfg.sigma_max(max(lo, 15.0)),
                           workers=cfg.workers,
                           seed_ordinates=[z.gamma.value for z in zeros])
    pcache = ZeroCache(kind="zprime", interval=(lo, hi), precision=cfg.target_digits,
                       entries=zp)
    ppath = pcache.write(cache_path(cfg.cache_dir, "zprime"))
    print(f"wrote {ppath} ({len(zp)} zeta' zeros)")
    return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def cmd_ingest(cfg: ScanConfig) -> int:
    if not cfg.ingest:
        raise ConfigError("ingest requires at least one path:kind entry")
    ecfg = cfg.eval_config()
    for path, kind in cfg.ingest:
        cache = ingest(path, kind, ecfg)
        out = cache.write(cache_path(cfg.cache_dir, cache.kind))
        print(f"ingested {path} -> {out} ({len(cache.entries)} entries)")
    return 0


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------

def _strong_worker(args):
    g_lo, g_hi, ecfg = args
    from .lehmer import ZeroPair as ZP

    lo = ZetaZero(gamma=BigReal(mp.make_mpf(g_lo), ecfg.prec_bits),
                  residual=BigReal(0 * mp.mpf(1), ecfg.prec_bits))
    hi = ZetaZero(gamma=BigReal(mp.make_mpf(g_hi), ecfg.prec_bits),
                  residual=BigReal(0 * mp.mpf(1), ecfg.prec_bits))
    pair = ZP(lower=lo, upper=hi)
    gap = pair.delta.value
    pl = neg_pxi_prime(pair.lower.gamma, ecfg, nearest_zero_dist=gap)
    pu = neg_pxi_prime(pair.upper.gamma, ecfg, nearest_zero_dist=gap)
    return g_lo, pl.value._mpf_, pu.value._mpf_


def build_pairs(zcache: ZeroCache, t_lo: float, t_hi: float) -> list[ZeroPair]:
    """Consecutive pairs with both members strictly inside (t_lo, t_hi)."""
    zs = zcache.entries
    pairs = []
    for a, b in zip(zs, zs[1:]):
        if t_lo < float(a.gamma.value) and float(b.gamma.value) < t_hi:
            pairs.append(ZeroPair(lower=a, upper=b))
    return pairs


def cmd_detect(cfg: ScanConfig) -> int:
    cfg.validate()
    ecfg = cfg.eval_config()
    zcache = load_cache(cache_path(cfg.cache_dir, "zeta"))
    pairs = build_pairs(zcache, cfg.t_lo, cfg.t_hi)
    n_total = len(pairs)
    if cfg.slice_limit:
        pairs = pairs[: cfg.slice_limit]
    skipped = 0
    kept = []
    for p in pairs:
        try:
            classify_pair(p, zcache.entries, cfg.g_window_gaps, zcache.interval)
        except ToolkitError:
            p.is_lehmer = None
        if p.is_lehmer is None:
            skipped += 1
            continue
        kept.append(p)
    # strong criterion for every classified pair, in parallel
    args = [(p.lower.gamma.value._mpf_, p.upper.gamma.value._mpf_, ecfg) for p in kept]
    results = {}
    if cfg.workers > 1 and len(args) > 1:
        ctx = get_context("fork")
        with ctx.Pool(cfg.workers) as pool:
            for g_lo, pl, pu in pool.imap_unordered(_strong_worker, args, chunksize=4):
                results[g_lo] = (pl, pu)
    else:
        for a in args:
            g_lo, pl, pu = _strong_worker(a)
            results[g_lo] = (pl, pu)
    from .errors import Theorem1ViolationError
    from .lehmer import STRONG_THRESHOLD_NUM

    with ecfg.workprec():
        for p in kept:
            pl, pu = results[p.lower.gamma.value._mpf_]
            p.pxi_lower = BigReal(mp.make_mpf(pl), ecfg.prec_bits)
            p.pxi_upper = BigReal(mp.make_mpf(pu), ecfg.prec_bits)
            lhs = p.delta.value ** 2 * (p.pxi_lower.value + p.pxi_upper.value)
            p.is_strong = YES if lhs < mp.mpf(STRONG_THRESHOLD_NUM) / 5 else NO
            if p.is_strong == YES and p.is_lehmer == NO:
                raise Theorem1ViolationError(
                    f"strong pair at {mp.nstr(p.lower.gamma.value, 15)} classified "
                    "not-Lehmer"
                )
            if p.is_lehmer == YES:
                dbn_bound(p)

    lines = [PAIR_CSV_COLUMNS]
    for p in kept:
        lines.append(",".join([
            str(p.lower.index if p.lower.index is not None else -1),
            _fmt(p.lower.gamma), _fmt(p.upper.gamma), _fmt(p.delta),
            _fmt(p.g_truncated), _fmt(p.g_tail_upper), sci25(p.g_window),
            str(LEHMER_FLAG[p.is_lehmer]), str(LEHMER_FLAG[p.is_strong]),
            _fmt(p.dbn_lower_bound), _fmt(p.pxi_lower), _fmt(p.pxi_upper),
            _fmt(p.strong_lhs),
        ]))
    out = Path(cfg.cache_dir) / "pairs.csv"
    atomic_write_text(out, "\n".join(lines) + "\n")

    n_yes = sum(1 for p in kept if p.is_lehmer == YES)
    n_no = sum(1 for p in kept if p.is_lehmer == NO)
    n_bord = sum(1 for p in kept if p.is_lehmer == BORDERLINE)
    n_strong = sum(1 for p in kept if p.is_strong == YES)
    summary = "\n".join([
        f"pairs_in_interval: {n_total}",
        f"pairs_classified: {len(kept)}",
        f"pairs_skipped: {skipped + n_total - len(pairs)}",
        f"lehmer_yes: {n_yes}",
        f"lehmer_no: {n_no}",
        f"lehmer_borderline: {n_bord}",
        f"strong_yes: {n_strong}",
    ]) + "\n"
    atomic_write_text(Path(cfg.cache_dir) / "detect_summary.txt", summary)
    print(summary, end="")
    print(f"wrote {out}")
    return 0


def load_pairs_csv(path) -> list[ZeroPair]:
    """Rebuild ZeroPair records from a pair CSV (for analyze/report)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"pair CSV {path} not found; run detect first")
    rows = path.read_text().splitlines()
    if not rows or rows[0] != PAIR_CSV_COLUMNS:
        raise DataError(f"{path} does not carry the documented pair columns")
    out = []
    bits = 128
    with mp.workprec(bits):
        for row in rows[1:]:
            f = row.split(",")
            if len(f) != 13:
                raise DataError(f"bad pair row: {row!r}")
            lo = ZetaZero(gamma=BigReal(mp.mpf(f[1]), bits),
                          residual=BigReal(mp.mpf(0), bits),
                          index=int(f[0]) if f[0] and f[0] != "-1" else None)
            hi = ZetaZero(gamma=BigReal(mp.mpf(f[2]), bits),
                          residual=BigReal(mp.mpf(0), bits))
            p = ZeroPair(lower=lo, upper=hi)
            p.g_truncated = BigReal(mp.mpf(f[4]), bits)
            p.g_tail_upper = BigReal(mp.mpf(f[5]), bits)
            p.g_window = float(mp.mpf(f[6]))
            p.is_lehmer = FLAG_LEHMER[int(f[7])]
            p.is_strong = FLAG_LEHMER[int(f[8])]
            if f[9]:
                p.dbn_lower_bound = BigReal(mp.mpf(f[9]), bits)
            if f[10]:
                p.pxi_lower = BigReal(mp.mpf(f[10]), bits)
            if f[11]:
                p.pxi_upper = BigReal(mp.mpf(f[11]), bits)
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _hist_csv(values, n_bins: int = 20) -> str:
    """Deterministic (bin_center, count) CSV body for a value list."""
    if not values:
        return "bin_center,count\n"
    vals = sorted(float(v) for v in values)
    lo, hi = vals[0], vals[-1]
    if hi == lo:
        hi = lo + 1.0
    width = (hi - lo) / n_bins
    counts = [0] * n_bins
    for v in vals:
        k = min(int((v - lo) / width), n_bins - 1)
        counts[k] += 1
    lines = ["bin_center,count"]
    for k in range(n_bins):
        center = lo + (k + 0.5) * width
        lines.append(f"{sci25(mp.mpf(center))},{counts[k]}")
    return "\n".join(lines) + "\n"


def cmd_analyze(cfg: ScanConfig, widen: bool = False) -> int:
    cfg.validate()
    ecfg = cfg.eval_config()
    zcache = load_cache(cache_path(cfg.cache_dir, "zeta"))
    pcache = load_cache(cache_path(cfg.cache_dir, "zprime"))
    pairs = load_pairs_csv(Path(cfg.cache_dir) / "pairs.csv")

    records = []
    skipped = 0
    for p in pairs:
        try:
            c = central_zero(p, pcache.entries, ecfg)
            rec = an_mod.build_analysis(p, c, pcache.entries, ecfg,
                                        zprime_interval=pcache.interval)
            records.append(rec)
        except (CentralZeroNotFoundError, CentralZeroMultiplicityError, ToolkitError):
            skipped += 1

    emit_dir = Path(cfg.cache_dir)
    lines = [ANALYSIS_CSV_COLUMNS]
    for r in records:
        lines.append(",".join([
            _fmt(r.pair.lower.gamma), _fmt(r.pair.upper.gamma), _fmt(r.t0),
            _fmt(r.X), _fmt(r.Y), _fmt(r.log_scale), _fmt(r.x), _fmt(r.y),
            _fmt(r.delta_scaled), _fmt(r.r),
            _fmt(r.terms.central_imag), _fmt(r.terms.central_real),
            _fmt(r.terms.central_real_unsimplified), _fmt(r.terms.stirling),
            _fmt(r.terms.rest_imag), _fmt(r.terms.rest_real),
            _fmt(r.window_residual), _fmt(r.strong_lhs),
            str(LEHMER_FLAG[r.pair.is_lehmer]), str(LEHMER_FLAG[r.pair.is_strong]),
        ]))
    atomic_write_text(emit_dir / "analysis.csv", "\n".join(lines) + "\n")

    if "histograms" in cfg.emit:
        _emit_histograms(records, pairs, pcache, emit_dir, widen)

    rep = an_mod.correlations(
        records,
        subset=(None if widen else (lambda r: r.pair.is_strong == YES)),
        pairs=pairs,
    )
    stats_text = str(rep) + f"\nanalysis_skipped: {skipped}\n"
    atomic_write_text(emit_dir / "stats.txt", stats_text)
    print(stats_text, end="")
    return 0


def _emit_histograms(records, pairs, pcache, emit_dir: Path, widen: bool):
    """Figure-series CSVs: zero scatters in both scalings plus term histograms."""
    import math

    # map each zeta' zero to its enclosing pair for coloring
    by_lo = {}
    for p in pairs:
        by_lo[float(p.lower.gamma.value)] = p
    pair_bounds = sorted(by_lo)
    fig4 = ["sigma_scaled,t_scaled,class"]
    fig5 = ["sigma_scaled,t_scaled,class"]
    import bisect

    for z in pcache.entries:
        g = float(z.gammap.value)
        i = bisect.bisect_right(pair_bounds, g) - 1
        if i < 0:
            continue
        p = by_lo[pair_bounds[i]]
        g_lo, g_hi = float(p.lower.gamma.value), float(p.upper.gamma.value)
        if not g_lo < g < g_hi:
            continue
        cls = 2 if p.is_strong == YES else (1 if p.is_lehmer == YES else 0)
        t0 = (g_lo + g_hi) / 2
        beta = float(z.beta.value)
        scale4 = math.log(g) / (2 * math.pi)
        fig4.append(f"{sci25(mp.mpf((beta - 0.5) * scale4))},"
                    f"{sci25(mp.mpf((g - t0) * scale4))},{cls}")
        scale5 = 1 / (g_hi - g_lo)
        s5 = (beta - 0.5) * scale5
        if abs(s5) <= 1.5:   # truncation rule applied only at emission
            fig5.append(f"{sci25(mp.mpf(s5))},{sci25(mp.mpf((g - t0) * scale5))},{cls}")
    atomic_write_text(emit_dir / "fig4_scatter.csv", "\n".join(fig4) + "\n")
    atomic_write_text(emit_dir / "fig5_scatter.csv", "\n".join(fig5) + "\n")

    sel = [r for r in records if widen or r.pair.is_strong == YES]
    atomic_write_text(emit_dir / "fig6_rest_real.csv", _hist_csv(
        [float(r.terms.rest_real.value) / float(r.delta_scaled.value) ** 2
         for r in sel if float(r.delta_scaled.value) != 0]))
    atomic_write_text(emit_dir / "fig8_central_real.csv", _hist_csv(
        [float(r.terms.central_real.value) for r in sel]))
    atomic_write_text(emit_dir / "fig8_stirling.csv", _hist_csv(
        [float(r.terms.stirling.value) for r in sel]))
    atomic_write_text(emit_dir / "fig12_central_imag.csv", _hist_csv(
        [float(r.terms.central_imag.value) for r in sel]))
    atomic_write_text(emit_dir / "fig12_rest_imag.csv", _hist_csv(
        [float(r.terms.rest_imag.value) for r in sel]))


# ---------------------------------------------------------------------------
# phase grid
# ---------------------------------------------------------------------------

def cmd_phase_grid(cfg: ScanConfig, sigma_lo: float, sigma_hi: float,
                   res_sigma: int, res_t: int) -> int:
    """Grid of arg(zeta'/zeta) over [sigma_lo, sigma_hi] x [t_lo, t_hi]."""
    if res_sigma < 1 or res_t < 1:
        raise ConfigError("resolution must be >= 1 in both directions")
    ecfg = cfg.eval_config()
    lines = ["sigma,t,arg"]
    with mp.workdps(16):
        for i in range(res_sigma):
            sig = sigma_lo + (sigma_hi - sigma_lo) * (i + 0.5) / res_sigma
            for j in range(res_t):
                t = cfg.t_lo + (cfg.t_hi - cfg.t_lo) * (j + 0.5) / res_t
                s = mp.mpc(sig, t)
                num = mp.zeta(s, derivative=1)
                den = mp.zeta(s)
                if den == 0 or not mp.isfinite(den) or not mp.isfinite(num):
                    val = "nan"
                else:
                    a = mp.arg(num / den)
                    if a == mp.pi:   # normalize to [-pi, pi)
                        a = -mp.pi
                    val = sci25(a)
                lines.append(f"{sci25(mp.mpf(sig))},{sci25(mp.mpf(t))},{val}")
    out = Path(cfg.cache_dir) / "phase_grid.csv"
    atomic_write_text(out, "\n".join(lines) + "\n")
    print(f"wrote {out} ({res_sigma}x{res_t} samples)")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def cmd_report(cfg: ScanConfig) -> int:
    for name in ("detect_summary.txt", "stats.txt"):
        p = Path(cfg.cache_dir) / name
        if p.exists():
            print(f"== {name} ==")
            print(p.read_text(), end="")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lehmerscan",
        description="Scan zeta zeros for Lehmer pairs and de Bruijn-Newman bounds",
    )
    ap.add_argument("--config", type=Path, help="key=value config file")
    ap.add_argument("--t-lo", type=float, dest="t_lo")
    ap.add_argument("--t-hi", type=float, dest="t_hi")
    ap.add_argument("--digits", type=int, dest="target_digits")
    ap.add_argument("--window", type=int, dest="g_window_gaps")
    ap.add_argument("--cache-dir", type=Path, dest="cache_dir")
    ap.add_argument("--emit", type=str, help="comma-separated emit targets")
    ap.add_argument("--ingest", type=str, action="append",
                    help="path:kind (kind in zeta_zeros, zprime_zeros)")
    ap.add_argument("--slice", type=int, dest="slice_limit",
                    help="bound the classified pair count (CI slices)")
    ap.add_argument("--workers", type=int)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("scan")
    sub.add_parser("ingest")
    sub.add_parser("detect")
    pa = sub.add_parser("analyze")
    pa.add_argument("--widen", action="store_true",
                    help="histogram/correlation population: all pairs, not just strong")
    pg = sub.add_parser("phase-grid")
    pg.add_argument("--sigma-lo", type=float, required=True)
    pg.add_argument("--sigma-hi", type=float, required=True)
    pg.add_argument("--res-sigma", type=int, default=32)
    pg.add_argument("--res-t", type=int, default=32)
    sub.add_parser("report")
    return ap


def config_from_args(args) -> ScanConfig:
    kv = {}
    if args.config:
        kv.update(load_config_file(args.config))
    cfg = scan_config_from_mapping(kv)
    for key in ("t_lo", "t_hi", "target_digits", "g_window_gaps", "cache_dir",
                "slice_limit", "workers"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "emit", None):
        cfg.emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    if getattr(args, "ingest", None):
        for entry in args.ingest:
            path, _, kind = entry.rpartition(":")
            cfg.ingest.append((Path(path), kind))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "scan":
            return cmd_scan(cfg)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "detect":
            return cmd_detect(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg, widen=args.widen)
        if args.command == "phase-grid":
            return cmd_phase_grid(cfg, args.sigma_lo, args.sigma_hi,
                                  args.res_sigma, args.res_t)
        if args.command == "report":
            return cmd_report(cfg)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical certification failure: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data validation failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
