"""Lehmer-pair classification and the pre-Schwarzian machinery.

A consecutive pair of critical-line zero ordinates (gamma-, gamma+) with
gap Delta is a Lehmer pair when Delta^2 g < 4/5, where g sums the inverse
square distances from both pair members to every other zero of Xi (the
reflected zeros at -gamma included). The truncated sum over a finite window
is paired with a certified tail bound, so every yes/no verdict is honest;
pairs whose verdict would flip inside the tail bound come out "borderline"
and are escalated by widening the window.

A certified Lehmer pair yields a negative lower bound on the de Bruijn-
Newman constant: lambda = ((1 - 5 Delta^2 g / 4)^(4/5) - 1) / (8 g).

The strong criterion replaces g by the derivative of the pre-Schwarzian of
Xi at the two ordinates: Delta^2 (-PXi'(gamma+) - PXi'(gamma-)) < 42/5,
a sufficient condition for the pair to be a Lehmer pair (asserted at
runtime on every record, since it is a theorem). -PXi' is evaluated as
((Xi'')^2 - Xi''' Xi') / (Xi')^2 to avoid the cancellation of the nested
quotient form near close pairs.

The cross-route identity: at a zero rho = 1/2 + i gamma (with eta = H zeta'
and H the full factor completing zeta to xi),

  -PXi'(gamma) = Re (eta'/eta)'(rho) + Re^2 (H'/H(rho))
                 + Im (eta'/eta(rho)) Im (H'/H(rho)) + 2 Re (H'/H)'(rho),

which this module evaluates with (zeta''/zeta')' obtained by contour
differentiation, never calling a third zeta derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import mpmath as mp

from .bignum import BigReal, as_mpf
from .config import EvalConfig
from .errors import (
    ConfigError,
    PrecisionError,
    Theorem1ViolationError,
    WindowNotCoveredError,
)
from .kernels import (
    completed_logderivs,
    contour_derivs,
    eval_Xi_and_derivs,
    zeta_raw,
)

YES = "yes"
NO = "no"
BORDERLINE = "borderline"

LEHMER_THRESHOLD_NUM = 4      # Delta^2 g < 4/5
STRONG_THRESHOLD_NUM = 42     # Delta^2 sum(-PXi') < 42/5


@dataclass
class ZeroPair:
    """Two consecutive zeros with the quantities the classification needs."""

    lower: object                 # ZetaZero
    upper: object                 # ZetaZero
    delta: BigReal = None
    g_truncated: BigReal = None
    g_tail_upper: BigReal = None
    g_window: float = None        # ordinate half-width actually used
    is_lehmer: str = None         # yes | no | borderline
    is_strong: str = None         # yes | no
    dbn_lower_bound: BigReal = None
    pxi_lower: BigReal = None     # -PXi'(gamma-)
    pxi_upper: BigReal = None     # -PXi'(gamma+)

    def __post_init__(self):
        if self.delta is None:
            bits = self.upper.gamma.precision_bits
            with mp.workprec(bits):
                self.delta = BigReal(self.upper.gamma.value - self.lower.gamma.value, bits)
        if self.delta.value <= 0:
            raise ConfigError("pair ordinates must be strictly increasing")

    @property
    def strong_lhs(self) -> BigReal | None:
        if self.pxi_lower is None or self.pxi_upper is None:
            return None
        bits = self.delta.precision_bits
        with mp.workprec(bits):
            return BigReal(self.delta.value ** 2 * (self.pxi_lower.value + self.pxi_upper.value), bits)


def local_average_gap(t):
    t = as_mpf(t)
    return 2 * mp.pi / mp.log(t / (2 * mp.pi))


def _covers(covered_interval, lo, hi) -> bool:
    if covered_interval is None:
        return False
    c_lo, c_hi = float(covered_interval[0]), float(covered_interval[1])
    # nothing exists below the first zero, so coverage down to ~14 suffices
    return (c_lo <= float(lo) or c_lo <= 14.2) and float(hi) <= c_hi


def reflection_tail(gamma_lo, gamma_hi, zeros) -> mp.mpf:
    """Contribution of the reflected zeros at -gamma: exact over the cached
    list, plus an integral-comparison remainder for zeros beyond it."""
    gm, gp = as_mpf(gamma_lo), as_mpf(gamma_hi)
    acc = mp.fsum([1 / (z.gamma.value + gm) ** 2 + 1 / (z.gamma.value + gp) ** 2
                   for z in zeros])
    z_hi = zeros[-1].gamma.value if zeros else mp.mpf(14)
    for g in (gm, gp):
        v = z_hi + g
        acc += (mp.log(v / (2 * mp.pi)) + 1) / (2 * mp.pi * v)
    return acc


def compute_g(pair: ZeroPair, zeros, window, covered_interval=None,
              complete: bool = False) -> tuple[BigReal, BigReal]:
    """(g_truncated, g_tail_upper) for the pair.

    window is the ordinate half-width of the truncation; zeros must cover
    [gamma- - window, gamma+ + window] (the caller passes the scanned
    interval bounds; `complete=True` declares the list to be the entire
    zero set, as for synthetic configurations, making the integral tail
    zero and the reflection sum exact).
    """
    W = as_mpf(window)
    if W <= 0:
        raise WindowNotCoveredError("window must be positive")
    gm = pair.lower.gamma.value
    gp = pair.upper.gamma.value
    lo, hi = gm - W, gp + W
    if not complete and not _covers(covered_interval, lo, hi):
        raise WindowNotCoveredError(
            f"zeros cover {covered_interval}, window needs [{mp.nstr(lo, 10)}, "
            f"{mp.nstr(hi, 10)}]"
        )
    terms = []
    for z in zeros:
        zv = z.gamma.value
        if zv == gm or zv == gp:
            continue
        if complete or lo <= zv <= hi:
            terms.append(1 / (zv - gm) ** 2 + 1 / (zv - gp) ** 2)
    g_trunc = mp.fsum(terms)

    if complete:
        tail = mp.fsum([1 / (z.gamma.value + gm) ** 2 + 1 / (z.gamma.value + gp) ** 2
                        for z in zeros])
    else:
        dbar = mp.log(gp / (2 * mp.pi)) / (2 * mp.pi)
        tail = 4 * dbar / W + reflection_tail(gm, gp, zeros)
    bits = pair.lower.gamma.precision_bits
    return BigReal(g_trunc, bits), BigReal(tail, bits)


def classify_lehmer(pair: ZeroPair) -> ZeroPair:
    """Set is_lehmer by the certified three-way rule."""
    if pair.g_truncated is None or pair.g_tail_upper is None:
        raise ConfigError("compute_g must run before classification")
    thresh = mp.mpf(LEHMER_THRESHOLD_NUM) / 5
    d2 = pair.delta.value ** 2
    hi = d2 * (pair.g_truncated.value + pair.g_tail_upper.value)
    lo = d2 * pair.g_truncated.value
    if hi < thresh:
        pair.is_lehmer = YES
    elif lo >= thresh:
        pair.is_lehmer = NO
    else:
        pair.is_lehmer = BORDERLINE
    return pair


def classify_pair(pair: ZeroPair, zeros, window_gaps: int, covered_interval,
                  max_escalations: int = 3) -> ZeroPair:
    """compute_g + classify, widening the window while the verdict is
    borderline and the cache allows it."""
    gaps = window_gaps
    for _ in range(max_escalations + 1):
        W = gaps * local_average_gap(pair.upper.gamma.value)
        try:
            g_t, g_tail = compute_g(pair, zeros, W, covered_interval)
        except WindowNotCoveredError:
            break
        pair.g_truncated, pair.g_tail_upper = g_t, g_tail
        pair.g_window = float(W)
        classify_lehmer(pair)
        if pair.is_lehmer != BORDERLINE:
            break
        gaps *= 2
    return pair


def dbn_bound(pair: ZeroPair) -> BigReal:
    """Lower bound on the de Bruijn-Newman constant from a certified pair:
    lambda = ((1 - 5 Delta^2 g / 4)^(4/5) - 1) / (8 g), in (-1/(8g), 0)."""
    if pair.is_lehmer != YES:
        raise ConfigError("dbn_bound requires is_lehmer = yes")
    bits = pair.delta.precision_bits
    with mp.workprec(bits):
        g = pair.g_truncated.value + pair.g_tail_upper.value
        u = 5 * pair.delta.value ** 2 * g / 4
        if u >= 1:
            raise PrecisionError(
                "5 Delta^2 g / 4 >= 1 on a yes-classified pair: classification bug"
            )
        lam = ((1 - u) ** (mp.mpf(4) / 5) - 1) / (8 * g)
        if not -1 / (8 * g) < lam < 0:
            raise PrecisionError("dbn bound outside (-1/(8g), 0)")
    pair.dbn_lower_bound = BigReal(lam, bits)
    return pair.dbn_lower_bound


def neg_pxi_prime(t, cfg: EvalConfig, nearest_zero_dist=None) -> BigReal:
    """-PXi'(t) = ((Xi'')^2 - Xi''' Xi') / (Xi')^2 at t."""
    xs = eval_Xi_and_derivs(t, 3, cfg, nearest_zero_dist=nearest_zero_dist)
    with cfg.workprec():
        x1, x2, x3 = xs[1].value, xs[2].value, xs[3].value
        if x1 == 0:
            raise PrecisionError(f"Xi'({t}) = 0; not a simple-zero ordinate")
        return BigReal((x2 ** 2 - x3 * x1) / x1 ** 2, cfg.prec_bits)


def strong_criterion(pair: ZeroPair, cfg: EvalConfig) -> ZeroPair:
    """Evaluate the strong inequality and assert Theorem 1.

    Stores -PXi' at both ordinates, sets is_strong by the strict comparison
    of Delta^2 (-PXi'(gamma+) - PXi'(gamma-)) against 42/5, and aborts with
    Theorem1ViolationError if a strong pair ever comes out not-Lehmer
    (mathematically impossible, hence a numerical fault)."""
    gap = pair.upper.gamma.value - pair.lower.gamma.value
    pair.pxi_lower = neg_pxi_prime(pair.lower.gamma, cfg, nearest_zero_dist=gap)
    pair.pxi_upper = neg_pxi_prime(pair.upper.gamma, cfg, nearest_zero_dist=gap)
    with cfg.workprec():
        lhs = pair.delta.value ** 2 * (pair.pxi_lower.value + pair.pxi_upper.value)
        pair.is_strong = YES if lhs < mp.mpf(STRONG_THRESHOLD_NUM) / 5 else NO
    if pair.is_strong == YES and pair.is_lehmer == NO:
        raise Theorem1ViolationError(
            f"strong pair at gamma- = {mp.nstr(pair.lower.gamma.value, 15)} "
            "classified not-Lehmer; numerical fault upstream"
        )
    return pair


def G_value(t, cfg: EvalConfig, nearest_zero_dist=None) -> BigReal:
    """G(t) = (3 Xi''(t)^2 - 4 Xi'''(t) Xi'(t)) / (4 Xi'(t)^2),
    identically -(PXi' + (PXi)^2 / 4)(t)."""
    xs = eval_Xi_and_derivs(t, 3, cfg, nearest_zero_dist=nearest_zero_dist)
    with cfg.workprec():
        x1, x2, x3 = xs[1].value, xs[2].value, xs[3].value
        if x1 == 0:
            raise PrecisionError(f"Xi'({t}) = 0 in G(t)")
        return BigReal((3 * x2 ** 2 - 4 * x3 * x1) / (4 * x1 ** 2), cfg.prec_bits)


def theorem2_rhs(rho, cfg: EvalConfig, nearest_zprime_dist=None) -> BigReal:
    """-PXi'(gamma) from zeta'-side data at the zero rho = 1/2 + i gamma.

    All four displayed terms, with eta'/eta = H'/H + zeta''/zeta' and
    (zeta''/zeta')' computed by contour differentiation of the ratio (no
    third zeta derivative). The contour radius halves on certification
    failure, which also catches circles accidentally enclosing a zero of
    zeta'."""
    with cfg.workprec():
        s = mp.mpc(rho)
        a, ap, _ = completed_logderivs(s)
        w = zeta_raw(s, 2) / zeta_raw(s, 1)
        ratio = lambda z: zeta_raw(z, 2) / zeta_raw(z, 1)
        r = cfg.contour_radius(abs(s.imag), nearest_zprime_dist)
        wp = None
        for _ in range(7):
            try:
                wp = contour_derivs(ratio, s, 1, r, cfg)[0]
                break
            except PrecisionError:
                r = r / 2
        if wp is None:
            raise PrecisionError(
                f"contour differentiation of zeta''/zeta' failed at {mp.nstr(s, 12)}"
            )
        ee = a + w          # eta'/eta at rho
        eep = ap + wp       # (eta'/eta)' at rho
        val = (eep.real + a.real ** 2 + ee.imag * a.imag + 2 * ap.real)
        return BigReal(val, cfg.prec_bits)


@dataclass
class Theorem3Result:
    approx_upper: BigReal      # approximation to -PXi'(gamma+)
    approx_lower: BigReal      # approximation to -PXi'(gamma-)
    residual_upper: BigReal    # approx - direct, at gamma+
    residual_lower: BigReal
    window: float              # 1/loglog(gamma0') actually used
    n_zeros_in_window: int = 0


def theorem3_rhs(pair: ZeroPair, zprime_zeros, cfg: EvalConfig,
                 central=None, covered_interval=None) -> Theorem3Result:
    """Window-sum approximation to (-PXi'(gamma+), -PXi'(gamma-)).

    Sums 1/(rho+- - rho')^2 and 1/(rho+- - rho') over the zeta' zeros with
    |gamma' - gamma0'| <= 1/loglog(gamma0'), adds the squared Stirling term,
    and reports the residual against the direct values (the dropped error
    terms of the statement, measured rather than asserted away)."""
    from .zprime import central_zero

    if central is None:
        central = central_zero(pair, zprime_zeros, cfg)
    with cfg.workprec():
        g0 = central.gammap.value
        win = 1 / mp.log(mp.log(g0))
        lo, hi = g0 - win, g0 + win
        if covered_interval is not None:
            c_lo, c_hi = covered_interval
            if not (mp.mpf(c_lo) <= lo and hi <= mp.mpf(c_hi)):
                raise WindowNotCoveredError(
                    f"zeta' cache covers [{c_lo}, {c_hi}], theorem-3 window "
                    f"needs [{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}]"
                )
        in_win = [z for z in zprime_zeros if lo <= z.gammap.value <= hi]
        if not in_win:
            raise WindowNotCoveredError("no zeta' zeros inside the theorem-3 window")
        stirl = (mp.log(g0 / (2 * mp.pi)) / 2) ** 2
        out = []
        for gz in (pair.upper.gamma.value, pair.lower.gamma.value):
            rho = mp.mpc(mp.mpf(1) / 2, gz)
            s1 = mp.fsum([1 / (rho - mp.mpc(z.beta.value, z.gammap.value))
                          for z in in_win], absolute=False)
            s2 = mp.fsum([1 / (rho - mp.mpc(z.beta.value, z.gammap.value)) ** 2
                          for z in in_win], absolute=False)
            out.append(-s2.real + mp.pi / 4 * s1.imag + stirl)
        direct_up = pair.pxi_upper.value if pair.pxi_upper is not None else \
            neg_pxi_prime(pair.upper.gamma, cfg, nearest_zero_dist=pair.delta.value).value
        direct_lo = pair.pxi_lower.value if pair.pxi_lower is not None else \
            neg_pxi_prime(pair.lower.gamma, cfg, nearest_zero_dist=pair.delta.value).value
        bits = cfg.prec_bits
        return Theorem3Result(
            approx_upper=BigReal(out[0], bits),
            approx_lower=BigReal(out[1], bits),
            residual_upper=BigReal(out[0] - direct_up, bits),
            residual_lower=BigReal(out[1] - direct_lo, bits),
            window=float(win),
            n_zeros_in_window=len(in_win),
        )
