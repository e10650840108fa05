"""Locating zeros of the Hardy function Z on critical-line intervals.

Strategy: Gram points partition the line into intervals that usually hold
exactly one sign change of Z. Blocks between consecutive "good" Gram points
(where (-1)^n Z(g_n) > 0) are searched for exactly as many sign changes as
the block has Gram intervals, with progressive subdivision up to 2^10
samples per interval for the nearly-coincident pairs this toolkit exists to
find. Brackets are then refined individually: cheap bisection at reduced
precision followed by secant polish at full working precision.

Completeness is asserted against the Riemann-von Mangoldt main term with a
tolerance from an explicit bound on the argument term S(T); a block whose
local count cannot be reconciled escalates precision before failing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from multiprocessing import get_context

import mpmath as mp

from .bignum import BigReal, as_mpf
from .config import EvalConfig
from .errors import CompletenessError, NoSignChangeError, PrecisionError

SCAN_DPS = 15           # bracketing precision; refinement reruns at full precision
MAX_SPLITS = 10         # per Gram interval: up to 2^10 sample points
_BISECT_TARGET = mp.mpf("1e-8")


@dataclass(frozen=True)
class ZetaZero:
    """A located zero of Z (equivalently of zeta on the critical line)."""

    gamma: BigReal
    residual: BigReal
    index: int | None = None          # 1-based global index when anchored
    provenance: str = "computed"      # computed | ingested
    index_inferred: bool = False      # True when the anchor came from N(T)

    def __lt__(self, other):
        return self.gamma.value < other.gamma.value


@dataclass
class GramBlock:
    n_start: int               # Gram index of the good point opening the block
    n_end: int                 # Gram index of the good point closing the block
    t_start: mp.mpf = None
    t_end: mp.mpf = None
    expected: int = 0
    found: int = 0

    @property
    def ok(self) -> bool:
        return self.found == self.expected


@dataclass
class CountReport:
    t_lo: float
    t_hi: float
    found: int
    expected: float
    tolerance: float
    passed: bool
    flagged_blocks: list = field(default_factory=list)

    def __str__(self):
        state = "pass" if self.passed else "FLAG"
        lines = [
            f"count check ({self.t_lo}, {self.t_hi}): {state}",
            f"  found {self.found}, main-term estimate {self.expected:.3f}, "
            f"tolerance +-{self.tolerance:.3f}",
        ]
        for blk in self.flagged_blocks:
            lines.append(
                f"  flagged Gram block [{blk.n_start}, {blk.n_end}]: "
                f"found {blk.found}, expected {blk.expected}"
            )
        return "\n".join(lines)


def rvm_main_term(t) -> mp.mpf:
    """(t/2pi) log(t/2pi) - t/2pi + 7/8, the smooth zero-counting term."""
    t = as_mpf(t)
    if t < 2:
        return mp.mpf(0)
    x = t / (2 * mp.pi)
    return x * mp.log(x) - x + mp.mpf(7) / 8


def count_tolerance(t) -> float:
    """Explicit bound on |S(T)| (argument term): 0.112 log T + 0.278 loglog T + 2.51."""
    t = max(float(t), 3.0)
    import math

    return 0.112 * math.log(t) + 0.278 * math.log(math.log(t)) + 2.51


def _theta(t):
    return mp.siegeltheta(t)


def _gram_index_below(t) -> int:
    """Largest n with g_n <= t."""
    n = int(mp.floor(_theta(t) / mp.pi))
    while mp.grampoint(n) > t:
        n -= 1
    while mp.grampoint(n + 1) <= t:
        n += 1
    return n


def _good(n: int, z_val) -> bool:
    return (z_val > 0) if n % 2 == 0 else (z_val < 0)


def _z_signed(t, dps: int):
    with mp.workdps(dps):
        return mp.siegelz(t)


def _gram_value(n: int, dps: int):
    with mp.workdps(dps):
        g = mp.grampoint(n)
    z = _z_signed(g, dps)
    k = 1
    while abs(z) < mp.mpf(10) ** (-(dps - 3)) and k <= 3:
        # ambiguous sign at a Gram point: escalate locally
        z = _z_signed(g, dps + 10 * k)
        k += 1
    return g, z


def _build_blocks(n_lo: int, n_hi: int, dps: int) -> list[GramBlock]:
    """Partition Gram indices into blocks between consecutive good points,
    extending outward so the good endpoints bracket [g_n_lo, g_n_hi]."""
    pts = {n: _gram_value(n, dps) for n in range(n_lo, n_hi + 1)}
    # extend downward to a good opening point (g_-1 is good: Z < 0 below
    # the first zero), and upward to a good closing point
    lo = n_lo
    while not _good(lo, pts[lo][1]):
        lo -= 1
        if lo < -1:
            raise CompletenessError("no good Gram point at the interval foot")
        pts[lo] = _gram_value(lo, dps)
    hi = n_hi
    while not _good(hi, pts[hi][1]):
        hi += 1
        if hi > n_hi + 64:
            raise CompletenessError("no good Gram point above the interval")
        pts[hi] = _gram_value(hi, dps)
    good_idx = [n for n in range(lo, hi + 1) if n in pts and _good(n, pts[n][1])]
    blocks = []
    for a, b in zip(good_idx, good_idx[1:]):
        blocks.append(GramBlock(n_start=a, n_end=b, t_start=pts[a][0],
                                t_end=pts[b][0], expected=b - a))
    return blocks


def _block_brackets(blk: GramBlock, dps: int) -> list[tuple[mp.mpf, mp.mpf]]:
    """Sign-change brackets inside a block, subdividing until the count
    matches the block's expected zero count (Rosser heuristic)."""
    with mp.workdps(dps):
        a, b = blk.t_start, blk.t_end
        # start from the Gram subdivision of the block
        m = blk.expected
        samples = [a + (b - a) * k / m for k in range(m + 1)]
        values = [mp.siegelz(t) for t in samples]
        for depth in range(MAX_SPLITS + 1):
            brackets = [
                (samples[i], samples[i + 1])
                for i in range(len(samples) - 1)
                if values[i] * values[i + 1] < 0
            ]
            if len(brackets) >= blk.expected:
                blk.found = len(brackets)
                return brackets
            if depth == MAX_SPLITS:
                break
            new_samples = []
            new_values = []
            for i in range(len(samples) - 1):
                mid = (samples[i] + samples[i + 1]) / 2
                new_samples.extend([samples[i], mid])
                new_values.extend([values[i], mp.siegelz(mid)])
            new_samples.append(samples[-1])
            new_values.append(values[-1])
            samples, values = new_samples, new_values
    blk.found = len(brackets)
    return brackets


def refine_zero(bracket, cfg: EvalConfig) -> ZetaZero:
    """Refine a sign-change bracket of Z to a certified zero.

    Bisection at reduced precision narrows the bracket, then a secant
    iteration at full working precision polishes the root. The residual
    |Z(gamma)| must come out below 10^(-target_digits+2), and the implied
    ordinate uncertainty residual/|Z'| below 10^(-target_digits).
    """
    a, b = as_mpf(bracket[0]), as_mpf(bracket[1])
    scan_dps = min(SCAN_DPS, cfg.working_digits)
    with mp.workdps(scan_dps):
        fa, fb = mp.siegelz(a), mp.siegelz(b)
        if fa * fb >= 0:
            raise NoSignChangeError(
                f"Z does not change sign on [{mp.nstr(a, 12)}, {mp.nstr(b, 12)}]"
            )
        # Illinois false position: bracket-preserving, superlinear
        side = 0
        for _ in range(80):
            if b - a <= _BISECT_TARGET:
                break
            m = (a * fb - b * fa) / (fb - fa)
            if not a < m < b:
                m = (a + b) / 2
            fm = mp.siegelz(m)
            if fm == 0:
                a = b = m
                break
            if fa * fm < 0:
                b, fb = m, fm
                if side == -1:
                    fa /= 2
                side = -1
            else:
                a, fa = m, fm
                if side == 1:
                    fb /= 2
                side = 1
    for attempt in range(cfg.max_retries + 1):
        acfg = cfg.escalated(attempt)
        with acfg.workprec():
            x0, x1 = mp.mpf(a), mp.mpf(b)
            f0, f1 = mp.siegelz(x0), mp.siegelz(x1)
            for _ in range(60):
                if f1 == f0:
                    break
                x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
                if not min(a, b) - 1 <= x2 <= max(a, b) + 1:
                    x2 = (x0 + x1) / 2
                f2 = mp.siegelz(x2)
                x0, f0, x1, f1 = x1, f1, x2, f2
                if abs(f1) < mp.mpf(10) ** (-(acfg.working_digits - 2)) * max(1, abs(x1) ** mp.mpf("0.25")):
                    break
            gamma, resid = x1, abs(f1)
            slope = abs(f1 - f0) / abs(x1 - x0) if x1 != x0 else mp.mpf(1)
            tol_resid = mp.mpf(10) ** (-cfg.target_digits + 2)
            if slope > 0 and resid < tol_resid and resid / slope < mp.mpf(10) ** (-cfg.target_digits):
                return ZetaZero(
                    gamma=BigReal(gamma, cfg.prec_bits),
                    residual=BigReal(resid, cfg.prec_bits),
                )
    raise PrecisionError(
        f"zero refinement near {mp.nstr((a + b) / 2, 12)} failed: "
        f"residual {mp.nstr(resid, 3)}, slope {mp.nstr(slope, 3)}"
    )


def _scan_chunk(args):
    """Worker: find and refine all zeros for a chunk of Gram blocks."""
    blocks, cfg, scan_dps = args
    results = []
    for blk in blocks:
        brackets = _block_brackets(blk, scan_dps)
        if blk.found < blk.expected:
            # escalate the whole block once at higher precision
            brackets = _block_brackets(blk, scan_dps + 10)
        for br in brackets:
            z = refine_zero(br, cfg)
            results.append((z.gamma.value._mpf_, z.residual.value._mpf_))
    return results, [(blk.n_start, blk.n_end, blk.expected, blk.found) for blk in blocks]


def scan_zeros(t_lo, t_hi, cfg: EvalConfig, workers: int | None = None,
               anchor_hint: int | None = None) -> tuple[list[ZetaZero], CountReport]:
    """All zeros of Z in the open interval (t_lo, t_hi), plus the count report.

    Gram blocks are distributed over worker processes and the merged result
    is ordered by ordinate, so the output is independent of worker count.
    Raises CompletenessError when a block cannot be reconciled after maximum
    subdivision and precision escalation.
    """
    t_lo, t_hi = as_mpf(t_lo), as_mpf(t_hi)
    if not 10 < t_lo < t_hi:
        if t_lo == t_hi:
            return [], CountReport(float(t_lo), float(t_hi), 0, 0.0, 0.0, True)
        raise ValueError("scan_zeros requires 10 < t_lo < t_hi")
    workers = workers or (os.cpu_count() or 1)
    scan_dps = min(SCAN_DPS, cfg.working_digits)

    with mp.workdps(scan_dps + 5):
        n_lo = max(_gram_index_below(t_lo) - 1, -1)
        n_hi = _gram_index_below(t_hi) + 2
        blocks = _build_blocks(n_lo, n_hi, scan_dps)

    chunks = max(1, min(workers * 4, len(blocks)))
    chunk_lists = [blocks[i::chunks] for i in range(chunks)]
    args = [(chunk, cfg, scan_dps) for chunk in chunk_lists if chunk]

    raw: list[tuple] = []
    block_stats = []
    if workers > 1 and len(args) > 1:
        ctx = get_context("fork")
        with ctx.Pool(workers) as pool:
            for res, stats in pool.imap_unordered(_scan_chunk, args):
                raw.extend(res)
                block_stats.extend(stats)
    else:
        for a in args:
            res, stats = _scan_chunk(a)
            raw.extend(res)
            block_stats.extend(stats)

    zeros = []
    with cfg.workprec():
        for g_t, r_t in raw:
            g = mp.make_mpf(g_t)
            if t_lo < g < t_hi:
                zeros.append(ZetaZero(gamma=BigReal(g, cfg.prec_bits),
                                      residual=BigReal(mp.make_mpf(r_t), cfg.prec_bits)))
    zeros.sort()

    # drop duplicate refinements from adjacent brackets, if any
    min_sep = mp.mpf(10) ** (-cfg.target_digits // 2)
    deduped = []
    for z in zeros:
        if deduped and abs(z.gamma.value - deduped[-1].gamma.value) < min_sep:
            continue
        deduped.append(z)
    zeros = deduped

    flagged = [GramBlock(n_start=a, n_end=b, expected=e, found=f)
               for (a, b, e, f) in block_stats if e != f]
    report = verify_count(t_lo, t_hi, len(zeros), cfg, flagged_blocks=flagged)
    if not report.passed:
        raise CompletenessError(str(report))

    anchored = anchor_hint if anchor_hint is not None else (1 if t_lo < 14 else None)
    if anchored is not None:
        zeros = [
            ZetaZero(gamma=z.gamma, residual=z.residual, index=anchored + i,
                     provenance=z.provenance, index_inferred=anchor_hint is not None)
            for i, z in enumerate(zeros)
        ]
    return zeros, report


def verify_count(t_lo, t_hi, found: int, cfg: EvalConfig,
                 flagged_blocks: list | None = None) -> CountReport:
    """Compare a zero count on (t_lo, t_hi) against the main-term estimate.

    The tolerance comes from the explicit S(T) bound at both endpoints; a
    mismatch beyond it, or any flagged Gram block, fails the report.
    """
    with cfg.workprec():
        expected = float(rvm_main_term(t_hi) - rvm_main_term(t_lo))
    tol = count_tolerance(t_hi) + (count_tolerance(t_lo) if float(t_lo) > 3 else 1.0)
    passed = abs(found - expected) <= tol and not flagged_blocks
    return CountReport(
        t_lo=float(t_lo), t_hi=float(t_hi), found=found, expected=expected,
        tolerance=tol, passed=passed, flagged_blocks=flagged_blocks or [],
    )
