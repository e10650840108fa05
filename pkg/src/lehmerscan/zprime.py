"""Locating zeros of zeta'(s) by winding numbers and Newton refinement.

The count of zeros inside a rectangle is the winding number of zeta' around
its boundary, tracked by adaptive phase sampling (refine until successive
phase jumps stay below pi/2). Rectangles are subdivided until each holds a
single zero, Newton's method refines from the rectangle center, and every
accepted zero is re-certified by a winding count of 1 on a small isolating
rectangle.

Under the standing Riemann Hypothesis assumption zeta' has no non-real
zeros left of the critical line (Speiser), so search rectangles may extend
slightly left of 1/2 to keep the boundary away from the near-line zeros of
close pairs; anything Newton finds with beta <= 1/2 is treated as an error
condition, never as data.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from multiprocessing import get_context

import mpmath as mp

from .bignum import BigReal, as_mpf
from .config import EvalConfig
from .errors import (
    BoundaryZeroError,
    CentralZeroMultiplicityError,
    CentralZeroNotFoundError,
    NewtonDivergenceError,
    PhaseStepError,
    ValidationError,
)
from .kernels import zeta_raw

WINDING_DPS = 12        # phase tracking needs a couple of digits only
MAX_EDGE_NODES = 4000   # adaptive refinement budget per rectangle boundary
_PHASE_LIMIT = mp.pi / 2


@dataclass(frozen=True)
class ZetaPrimeZero:
    """A located zero of zeta', certified by a unit winding count."""

    beta: BigReal
    gammap: BigReal
    residual: BigReal
    winding_certified: bool = False
    provenance: str = "computed"
    enclosing_pair: object = None     # optional back-reference to a ZeroPair

    def __lt__(self, other):
        return self.gammap.value < other.gammap.value


@dataclass(frozen=True)
class _Rect:
    s_lo: float   # sigma bounds
    s_hi: float
    t_lo: float   # ordinate bounds
    t_hi: float

    def center(self):
        return mp.mpc((self.s_lo + self.s_hi) / 2, (self.t_lo + self.t_hi) / 2)

    def contains(self, z, margin=0.0) -> bool:
        return (self.s_lo - margin <= z.real <= self.s_hi + margin
                and self.t_lo - margin <= z.imag <= self.t_hi + margin)


def _avg_gap(t: float) -> float:
    import math

    return 2 * math.pi / math.log(max(float(t), 10.0) / (2 * math.pi))


def _winding_rect(rect: _Rect, f, min_abs_floor, budget=MAX_EDGE_NODES):
    """Winding number of f around rect, adaptive phase tracking.

    Each edge starts with samples dense enough that the smooth phase drift
    of zeta' (rate about log(t/2pi) per unit ordinate) cannot wrap a full
    turn between neighbors, then refines wherever a jump reaches pi/2.
    Raises BoundaryZeroError when |f| dips below min_abs_floor on the
    boundary (a zero dangerously close to the contour) and PhaseStepError
    when the refinement budget is exhausted.
    """
    import math

    corners = [
        mp.mpc(rect.s_lo, rect.t_lo),
        mp.mpc(rect.s_hi, rect.t_lo),
        mp.mpc(rect.s_hi, rect.t_hi),
        mp.mpc(rect.s_lo, rect.t_hi),
        mp.mpc(rect.s_lo, rect.t_lo),
    ]
    rate = max(0.75 * math.log(max(rect.t_hi, 10.0) / (2 * math.pi)), 1.0)
    total = mp.mpf(0)
    nodes = 0
    for a, b in zip(corners, corners[1:]):
        # params in [0,1] along the edge; values cached per param
        vals = {}

        def fv(x):
            v = vals.get(x)
            if v is None:
                v = f(a + (b - a) * x)
                vals[x] = v
            return v

        n_init = max(1, int(math.ceil(abs(complex(b - a)) * rate / (math.pi / 4))))
        params = [mp.mpf(k) / n_init for k in range(n_init + 1)]
        stack = list(zip(params, params[1:]))
        while stack:
            x0, x1 = stack.pop()
            v0, v1 = fv(x0), fv(x1)
            if abs(v0) < min_abs_floor or abs(v1) < min_abs_floor:
                raise BoundaryZeroError(
                    f"|f| below {mp.nstr(min_abs_floor, 3)} on rectangle edge near "
                    f"{mp.nstr(a + (b - a) * x0, 10)}"
                )
            dphi = mp.arg(v1 / v0)
            if abs(dphi) >= _PHASE_LIMIT:
                nodes += 1
                if nodes > budget:
                    raise PhaseStepError(
                        f"phase tracking exceeded {budget} nodes on rectangle "
                        f"[{rect.s_lo}, {rect.s_hi}] x [{rect.t_lo}, {rect.t_hi}]"
                    )
                xm = (x0 + x1) / 2
                stack.append((x0, xm))
                stack.append((xm, x1))
            else:
                total += dphi
    w = total / (2 * mp.pi)
    wi = int(mp.nint(w))
    if abs(w - wi) > 0.25:
        raise PhaseStepError(
            f"winding estimate {mp.nstr(w, 5)} is not settled on an integer"
        )
    return wi


def count_zeros_rect(corner_lo, corner_hi, cfg: EvalConfig) -> int:
    """Number of zeros of zeta' inside the rectangle [corner_lo, corner_hi].

    corner_lo/corner_hi are complex lower-left and upper-right corners.
    Perturbs the rectangle outward up to 3 times if a zero sits on the
    boundary, then fails with BoundaryZeroError.
    """
    lo, hi = mp.mpc(corner_lo), mp.mpc(corner_hi)
    rect = _Rect(float(lo.real), float(hi.real), float(lo.imag), float(hi.imag))
    count, _ = _count_rect_ex(rect, cfg)
    return count


def _count_rect_ex(rect: _Rect, cfg: EvalConfig, budget=MAX_EDGE_NODES):
    """(count, possibly-perturbed rect); boundary-zero auto-perturbation."""
    gap = _avg_gap(rect.t_hi)
    shift = 1e-3 * gap
    with mp.workdps(WINDING_DPS):
        floor = mp.mpf(10) ** (-(WINDING_DPS - 4))
        f = lambda s: zeta_raw(s, 1)
        attempt_rect = rect
        for attempt in range(4):
            try:
                return _winding_rect(attempt_rect, f, floor, budget), attempt_rect
            except BoundaryZeroError:
                if attempt == 3:
                    raise
                d = shift * (attempt + 1)
                attempt_rect = _Rect(rect.s_lo - d, rect.s_hi + d,
                                     rect.t_lo - d, rect.t_hi + d)
    raise BoundaryZeroError("unreachable")


def _newton_zprime(s0, cfg: EvalConfig, low_dps=16, low_iters=14):
    """Newton iteration on zeta' with step damping; two-stage precision.

    The value at the new iterate doubles as both the damping check and the
    next step's numerator, so each undamped iteration costs one zeta' and
    one zeta'' evaluation. Total iteration cap 60 across both stages."""
    def run(s, dps, iters, tol):
        with mp.workdps(dps):
            s = mp.mpc(s)
            s0_loc = s
            # the evaluation noise floor scales with the height, so the
            # step criterion cannot be pushed below |s| * 10^(2-dps)
            tol = max(tol, abs(s) * mp.mpf(10) ** (-(dps - 2)))
            f1 = zeta_raw(s, 1)
            converged = False
            endgame = mp.sqrt(tol)
            for it in range(iters):
                f2 = zeta_raw(s, 2)
                if f2 == 0:
                    raise NewtonDivergenceError("zeta'' vanished during Newton")
                step = f1 / f2
                s_new = s - step
                f1_new = zeta_raw(s_new, 1)
                # damping guards the approach; skip it in the quadratic
                # endgame where value comparisons are noise-floor flips
                if abs(step) > endgame:
                    damp = 0
                    while abs(f1_new) > abs(f1) and damp < 6:
                        step /= 2
                        s_new = s - step
                        f1_new = zeta_raw(s_new, 1)
                        damp += 1
                s, f1 = s_new, f1_new
                if abs(step) < tol:
                    converged = True
                    break
                if it >= 3 and abs(s - s0_loc) > 1:
                    break   # wandered out of any plausible basin
            return s, abs(f1), converged
    s, _, ok = run(s0, low_dps, low_iters, mp.mpf(10) ** (-(low_dps - 6)))
    if not ok:
        raise NewtonDivergenceError(
            f"low-precision Newton stalled from {mp.nstr(mp.mpc(s0), 10)}"
        )
    # climb the precision ladder: each stage doubles the digits roughly,
    # so each needs only one or two quadratic steps
    mid_dps = (low_dps + cfg.working_digits) // 2
    if mid_dps > low_dps + 4:
        s, _, _ = run(s, mid_dps, 6, mp.mpf(10) ** (-(mid_dps - 4)))
    with cfg.workprec():
        s, resid, _ = run(s, cfg.working_digits, 40,
                          mp.mpf(10) ** (-cfg.target_digits - 3))
        if resid > mp.mpf(10) ** (-cfg.target_digits + 2):
            raise NewtonDivergenceError(
                f"Newton residual {mp.nstr(resid, 3)} too large near {mp.nstr(s, 12)}"
            )
        return mp.mpc(s), resid


def _certify_zero(s, cfg: EvalConfig, halfwidth: float):
    """Isolating-rectangle winding check around a refined zero."""
    rect = _Rect(float(s.real) - halfwidth, float(s.real) + halfwidth,
                 float(s.imag) - halfwidth, float(s.imag) + halfwidth)
    count, used = _count_rect_ex(rect, cfg, budget=800)
    return count == 1


def _locate_in_rect(rect: _Rect, cfg: EvalConfig, depth=0) -> list:
    """Recursively isolate and refine all zeta' zeros inside rect."""
    count, used = _count_rect_ex(rect, cfg)
    if count == 0:
        return []
    if count == 1:
        try:
            s, resid = _newton_zprime(used.center(), cfg)
        except NewtonDivergenceError:
            if depth >= 24:
                raise
            s = None
        if s is not None and used.contains(s, margin=1e-12) and depth < 40:
            # isolating rectangle shrinks with depth so a nearby second zero
            # cannot block certification forever
            halfwidth = max(1e-3 * _avg_gap(used.t_hi) * 0.5 ** depth,
                            10 ** (-cfg.target_digits // 3))
            if _certify_zero(s, cfg, halfwidth):
                return [(s, resid)]
        # Newton left the rectangle or certification failed: split further
        if depth >= 24:
            raise NewtonDivergenceError(
                f"could not isolate the zero in [{used.s_lo}, {used.s_hi}] "
                f"x [{used.t_lo}, {used.t_hi}]"
            )
    # substantive subdivision: halve the taller side
    if (used.t_hi - used.t_lo) >= (used.s_hi - used.s_lo):
        tm = (used.t_lo + used.t_hi) / 2
        parts = [_Rect(used.s_lo, used.s_hi, used.t_lo, tm),
                 _Rect(used.s_lo, used.s_hi, tm, used.t_hi)]
    else:
        sm = (used.s_lo + used.s_hi) / 2
        parts = [_Rect(used.s_lo, sm, used.t_lo, used.t_hi),
                 _Rect(sm, used.s_hi, used.t_lo, used.t_hi)]
    out = []
    for p in parts:
        out.extend(_locate_in_rect(p, cfg, depth + 1))
    return out


def _certified_zero(s, resid, cfg: EvalConfig):
    """Shrink the isolating rectangle until the winding count is exactly 1."""
    halfwidth = 0.05 * _avg_gap(float(s.imag))
    for _ in range(6):
        if _certify_zero(s, cfg, halfwidth):
            return True
        halfwidth /= 4
    return False


def _block_worker(args):
    """Count a block by winding, hunt its zeros by seeded Newton, certify
    each on a tiny rectangle, and reconcile; on any mismatch fall back to
    full rectangle subdivision."""
    rect, seeds, sigma_left, sigma_max, cfg = args
    import math

    count, used = _count_rect_ex(rect, cfg)
    if count == 0:
        return []
    lam = math.log(max(used.t_hi, 20.0) / (2 * math.pi))
    sigma0 = 0.5 + 0.7 / lam
    starts = [mp.mpc(sigma0, t) for t in seeds if used.t_lo < t < used.t_hi]
    if len(starts) < count + 1:
        n = count + 2
        starts += [mp.mpc(sigma0, used.t_lo + (used.t_hi - used.t_lo) * (k + 0.5) / n)
                   for k in range(n)]
    found = []
    for s0 in starts:
        if len([f for f in found
                if used.t_lo < float(f[0].imag) < used.t_hi]) >= count:
            break
        try:
            s, resid = _newton_zprime(s0, cfg)
        except NewtonDivergenceError:
            continue
        if not (sigma_left <= s.real <= sigma_max):
            continue
        if any(abs(s - f[0]) < 1e-6 for f in found):
            continue
        if _certified_zero(s, resid, cfg):
            found.append((s, resid))
    in_block = [f for f in found if used.t_lo < float(f[0].imag) < used.t_hi]
    if len(in_block) != count:
        # seeded hunt missed or over-collected: authoritative subdivision
        found = _locate_in_rect(used, cfg)
        in_block = found
    return [(s.real._mpf_, s.imag._mpf_, r._mpf_) for s, r in in_block]


def find_zprime_zeros(t_lo, t_hi, cfg: EvalConfig, sigma_max=None,
                      workers: int | None = None,
                      seed_ordinates=None) -> list[ZetaPrimeZero]:
    """All zeros of zeta' with ordinate in (t_lo, t_hi) and beta < sigma_max.

    sigma_max defaults to 1/2 + 4/log(t_lo), wide enough for the observed
    far tail of zeta' zeros at several times the average gap. The search
    strip extends a little left of the critical line so that near-line
    zeros never sit on the contour; a zero refined to beta <= 1/2 raises
    ValidationError since it would contradict the standing RH assumption.

    seed_ordinates (critical-line zero ordinates, when already scanned)
    seed the Newton starts at gap midpoints; completeness never depends on
    them since every block reconciles against its winding count.
    """
    t_lo, t_hi = float(t_lo), float(t_hi)
    if t_lo <= 10:
        raise ValueError("find_zprime_zeros requires t_lo > 10")
    import math

    if sigma_max is None:
        sigma_max = 0.5 + 4 / math.log(t_lo)
    sigma_left = 0.5 - min(0.05, 0.1 * _avg_gap(t_lo))
    workers = workers or (os.cpu_count() or 1)

    gap = _avg_gap(t_lo)
    pad = 1e-3 * gap
    block_h = 6 * gap
    n_blocks = max(1, int(math.ceil((t_hi - t_lo) / block_h)))
    edges = [t_lo - pad + (t_hi - t_lo + 2 * pad) * k / n_blocks
             for k in range(n_blocks + 1)]
    rects = [_Rect(sigma_left, float(sigma_max), edges[k], edges[k + 1])
             for k in range(n_blocks)]
    mids = []
    if seed_ordinates:
        seq = sorted(float(g) for g in seed_ordinates)
        mids = [(a + b) / 2 for a, b in zip(seq, seq[1:])]
    args = [(r, [m for m in mids if r.t_lo - gap < m < r.t_hi + gap],
             sigma_left, float(sigma_max), cfg) for r in rects]

    raw = []
    if workers > 1 and len(args) > 1:
        ctx = get_context("fork")
        with ctx.Pool(workers) as pool:
            for res in pool.imap_unordered(_block_worker, args):
                raw.extend(res)
    else:
        for a in args:
            raw.extend(_block_worker(a))

    zeros = []
    with cfg.workprec():
        for br, gr, rr in raw:
            beta = mp.make_mpf(br)
            gammap = mp.make_mpf(gr)
            if not t_lo < gammap < t_hi:
                continue
            if beta <= mp.mpf(1) / 2:
                raise ValidationError(
                    f"zeta' zero at {mp.nstr(beta, 12)} + {mp.nstr(gammap, 12)}i "
                    "has beta <= 1/2, contradicting the standing RH assumption"
                )
            zeros.append(ZetaPrimeZero(
                beta=BigReal(beta, cfg.prec_bits),
                gammap=BigReal(gammap, cfg.prec_bits),
                residual=BigReal(mp.make_mpf(rr), cfg.prec_bits),
                winding_certified=True,
            ))
    zeros.sort()
    # de-duplicate across slice boundaries
    out = []
    for z in zeros:
        if out and (abs(z.gammap.value - out[-1].gammap.value) < mp.mpf(10) ** (-cfg.target_digits // 2)
                    and abs(z.beta.value - out[-1].beta.value) < mp.mpf(10) ** (-cfg.target_digits // 2)):
            continue
        out.append(z)
    return out


def central_zero(pair, zeros: list[ZetaPrimeZero], cfg: EvalConfig) -> ZetaPrimeZero:
    """The unique zeta' zero strictly between the pair's ordinates with
    beta < 1/2 + 1/log(gamma').

    Runs a targeted rectangle search before giving up; more than one
    candidate raises CentralZeroMultiplicityError (recorded by callers,
    never silently resolved).
    """
    import math

    g_lo = float(pair.lower.gamma.value)
    g_hi = float(pair.upper.gamma.value)
    cands = [
        z for z in zeros
        if g_lo < float(z.gammap.value) < g_hi
        and float(z.beta.value) < 0.5 + 1 / math.log(float(z.gammap.value))
    ]
    if len(cands) > 1:
        raise CentralZeroMultiplicityError(
            f"{len(cands)} central candidates for the pair at {g_lo:.6f}"
        )
    if len(cands) == 1:
        return cands[0]
    # targeted search in the pair's gap
    sigma_left = 0.5 - min(0.05, 0.1 * _avg_gap(g_hi))
    sigma_right = 0.5 + 1 / math.log(g_hi)
    rect = _Rect(sigma_left, sigma_right, g_lo + 1e-9 * (g_hi - g_lo),
                 g_hi - 1e-9 * (g_hi - g_lo))
    found = _locate_in_rect(rect, cfg)
    found = [f for f in found if float(f[0].real) > 0.5]
    if not found:
        raise CentralZeroNotFoundError(
            f"no zeta' zero between {g_lo:.6f} and {g_hi:.6f} within "
            f"1/log of the critical line"
        )
    if len(found) > 1:
        raise CentralZeroMultiplicityError(
            f"{len(found)} central candidates for the pair at {g_lo:.6f}"
        )
    s, resid = found[0]
    with cfg.workprec():
        return ZetaPrimeZero(
            beta=BigReal(s.real, cfg.prec_bits),
            gammap=BigReal(s.imag, cfg.prec_bits),
            residual=BigReal(resid, cfg.prec_bits),
            winding_certified=True,
        )
