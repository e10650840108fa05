"""Scaled coordinates, term breakdowns, series predictions, and statistics.

For a pair (gamma-, gamma+) with central zeta' zero rho0' = 1/2 + X +
i(t0 + Y), everything is rescaled by lambda = log(t0 / 2pi): x = X lambda,
y = Y lambda, delta = Delta lambda / (2 pi) (the gap in units of the local
average gap), r = X / Delta.

The strong-pair quantity Delta^2 (-PXi'(gamma+) - PXi'(gamma-)) decomposes
over the window sums into five recorded contributions:

  central_imag  the central zero's 1/(rho+- - rho0') imaginary parts (odd in Y)
  central_real  -Delta^2 Re sum 1/(rho+- - rho0')^2, reported both in the
                Y=0 closed form 8(1-4r^2)/(1+4r^2)^2 and unsimplified
  stirling      Delta^2 log(gamma0'/2pi)^2 / 2 = 2 pi^2 delta'^2
  rest_imag     remaining in-window zeta' zeros, imaginary parts
  rest_real     remaining in-window zeta' zeros, real parts

plus a measured residual (the window truncation of the underlying sums), so
the five terms, the simplification error, and the residual reconstruct the
strong-pair left side exactly by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

from .bignum import BigReal, as_mpf
from .config import EvalConfig
from .errors import ConfigError, InsufficientDataError, WindowNotCoveredError
from .lehmer import YES, ZeroPair, neg_pxi_prime

_ASSERT_REL = None  # filled per-call from working precision


@dataclass
class TermBreakdown:
    central_imag: BigReal = None
    central_real: BigReal = None          # the Y=0 closed form, max 8 at r=0
    central_real_unsimplified: BigReal = None
    stirling: BigReal = None
    rest_imag: BigReal = None
    rest_real: BigReal = None


@dataclass
class PairAnalysis:
    pair: ZeroPair
    central: object = None        # ZetaPrimeZero
    t0: BigReal = None
    X: BigReal = None
    Y: BigReal = None
    log_scale: BigReal = None     # lambda = log(t0 / 2pi)
    x: BigReal = None
    y: BigReal = None
    delta_scaled: BigReal = None
    r: BigReal = None
    terms: TermBreakdown = field(default_factory=TermBreakdown)
    thm2_lower: BigReal = None
    thm2_upper: BigReal = None
    strong_lhs: BigReal = None
    window_residual: BigReal = None   # strong_lhs minus the unsimplified term sum


def _pair_points(pair: ZeroPair, central):
    gm = pair.lower.gamma.value
    gp = pair.upper.gamma.value
    t0 = (gm + gp) / 2
    X = central.beta.value - mp.mpf(1) / 2
    Y = central.gammap.value - t0
    return gm, gp, t0, X, Y


def scaled_coords(pair: ZeroPair, central, cfg: EvalConfig | None = None) -> PairAnalysis:
    """Fill the rescaled coordinate block of a PairAnalysis."""
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        gm, gp, t0, X, Y = _pair_points(pair, central)
        lam = mp.log(t0 / (2 * mp.pi))
        delta = pair.delta.value
        bits = cfg.prec_bits
        an = PairAnalysis(pair=pair, central=central)
        an.t0 = BigReal(t0, bits)
        an.X = BigReal(X, bits)
        an.Y = BigReal(Y, bits)
        an.log_scale = BigReal(lam, bits)
        an.x = BigReal(X * lam, bits)
        an.y = BigReal(Y * lam, bits)
        an.delta_scaled = BigReal(delta * lam / (2 * mp.pi), bits)
        an.r = BigReal(X / delta, bits)
        if not gm < t0 + Y < gp:
            raise ConfigError(
                f"central zero ordinate {mp.nstr(t0 + Y, 15)} outside the pair"
            )
        return an


def _assert_close(a, b, cfg: EvalConfig, what: str):
    tol = mp.mpf(10) ** (-(cfg.working_digits - 6))
    scale = max(abs(a), abs(b), mp.mpf(1) ** 0)
    if abs(a - b) > tol * scale:
        raise ConfigError(
            f"dual-route disagreement in {what}: {mp.nstr(a, 20)} vs {mp.nstr(b, 20)}"
        )


def term_central_imag(pair: ZeroPair, central, cfg: EvalConfig | None = None) -> BigReal:
    """Central-zero imaginary contribution (odd function of Y).

    Closed form -2 pi Y (1 - 4(X^2+Y^2)/Delta^2) / D with
    D = 1 + 8 (X^2 - Y^2)/Delta^2 + 16 (X^2 + Y^2)^2 / Delta^4, asserted
    equal to the sum route Delta^2 Im(1/(rho- - rho0') + 1/(rho+ - rho0'))
    * pi/4 at working precision.
    """
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        gm, gp, t0, X, Y = _pair_points(pair, central)
        d = pair.delta.value
        if d == 0:
            raise ConfigError("degenerate pair: Delta = 0")
        S = X * X + Y * Y
        closed = (-2 * mp.pi * Y * (1 - 4 * S / d ** 2)
                  / (1 + 8 * (X * X - Y * Y) / d ** 2 + 16 * S ** 2 / d ** 4))
        rho0 = mp.mpc(central.beta.value, central.gammap.value)
        rm = mp.mpc(mp.mpf(1) / 2, gm)
        rp = mp.mpc(mp.mpf(1) / 2, gp)
        sumroute = d ** 2 * (1 / (rm - rho0) + 1 / (rp - rho0)).imag * mp.pi / 4
        _assert_close(closed, sumroute, cfg, "central imaginary term")
        return BigReal(closed, cfg.prec_bits)


def term_central_real(pair: ZeroPair, central, cfg: EvalConfig | None = None
                      ) -> tuple[BigReal, BigReal]:
    """(simplified, unsimplified) central-zero real contribution.

    Simplified: the Y = 0 closed form 8(1-4r^2)/(1+4r^2)^2. Unsimplified:
    -Delta^2 Re(1/(rho- - rho0')^2 + 1/(rho+ - rho0')^2) with Y retained,
    so the simplification error is measurable.
    """
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        gm, gp, t0, X, Y = _pair_points(pair, central)
        d = pair.delta.value
        if d == 0:
            raise ConfigError("degenerate pair: Delta = 0")
        r2 = (X / d) ** 2
        simplified = 8 * (1 - 4 * r2) / (1 + 4 * r2) ** 2
        rho0 = mp.mpc(central.beta.value, central.gammap.value)
        rm = mp.mpc(mp.mpf(1) / 2, gm)
        rp = mp.mpc(mp.mpf(1) / 2, gp)
        unsimplified = -d ** 2 * (1 / (rm - rho0) ** 2 + 1 / (rp - rho0) ** 2).real
        return BigReal(simplified, cfg.prec_bits), BigReal(unsimplified, cfg.prec_bits)


def term_stirling(pair: ZeroPair, central, cfg: EvalConfig | None = None) -> BigReal:
    """Delta^2 log(gamma0'/2pi)^2 / 2, which is 2 pi^2 delta'^2 for the gap
    rescaled by log(gamma0'/2pi) (asserted)."""
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        d = pair.delta.value
        lam0 = mp.log(central.gammap.value / (2 * mp.pi))
        val = d ** 2 * lam0 ** 2 / 2
        deltap = d * lam0 / (2 * mp.pi)
        _assert_close(val, 2 * mp.pi ** 2 * deltap ** 2, cfg, "Stirling term")
        return BigReal(val, cfg.prec_bits)


def term_rest(pair: ZeroPair, zprime_zeros, central, cfg: EvalConfig | None = None,
              covered_interval=None) -> tuple[BigReal, BigReal]:
    """(rest_imag, rest_real): in-window zeta' zeros other than the central
    one, summed for both pair members.

    Window: |gamma' - gamma0'| <= 1/loglog(gamma0').
    """
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        gm, gp, t0, X, Y = _pair_points(pair, central)
        d = pair.delta.value
        g0 = central.gammap.value
        win = 1 / mp.log(mp.log(g0))
        lo, hi = g0 - win, g0 + win
        if covered_interval is not None and not (
            mp.mpf(covered_interval[0]) <= lo and hi <= mp.mpf(covered_interval[1])
        ):
            raise WindowNotCoveredError(
                f"zeta' cache covers {covered_interval}, rest-term window needs "
                f"[{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}]"
            )
        rm = mp.mpc(mp.mpf(1) / 2, gm)
        rp = mp.mpc(mp.mpf(1) / 2, gp)
        rho0 = mp.mpc(central.beta.value, central.gammap.value)
        s1 = mp.mpc(0)
        s2 = mp.mpc(0)
        for z in zprime_zeros:
            if not lo <= z.gammap.value <= hi:
                continue
            rho = mp.mpc(z.beta.value, z.gammap.value)
            if rho == rho0:
                continue
            s1 += 1 / (rp - rho) + 1 / (rm - rho)
            s2 += 1 / (rp - rho) ** 2 + 1 / (rm - rho) ** 2
        rest_imag = d ** 2 * s1.imag * mp.pi / 4
        rest_real = -d ** 2 * s2.real
        return BigReal(rest_imag, cfg.prec_bits), BigReal(rest_real, cfg.prec_bits)


def series_x(delta_scaled, log_scale, cfg: EvalConfig | None = None) -> BigReal:
    """Leading-order prediction x(delta) = pi^2/4 (1 - log(pi)/lambda) delta^2."""
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        dl = as_mpf(delta_scaled)
        lam = as_mpf(log_scale)
        return BigReal(mp.pi ** 2 / 4 * (1 - mp.log(mp.pi) / lam) * dl ** 2, cfg.prec_bits)


def series_y(pair: ZeroPair, zeros, log_scale, window, cfg: EvalConfig | None = None
             ) -> tuple[BigReal, float]:
    """Leading-order prediction y(delta) = pi^2/(2 lambda) (pi/4 +
    sum 1/(t0 - gamma)) delta^2, the zero-sum truncated at `window`;
    returns (value, truncation radius used)."""
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        lam = as_mpf(log_scale)
        W = as_mpf(window)
        if W <= 0:
            raise WindowNotCoveredError("series_y window must be positive")
        gm = pair.lower.gamma.value
        gp = pair.upper.gamma.value
        t0 = (gm + gp) / 2
        delta = pair.delta.value * lam / (2 * mp.pi)
        acc = mp.fsum([1 / (t0 - z.gamma.value) for z in zeros
                       if abs(z.gamma.value - t0) <= W
                       and z.gamma.value != gm and z.gamma.value != gp])
        val = mp.pi ** 2 / (2 * lam) * (mp.pi / 4 + acc) * delta ** 2
        return BigReal(val, cfg.prec_bits), float(W)


def build_analysis(pair: ZeroPair, central, zprime_zeros, cfg: EvalConfig,
                   zprime_interval=None, with_thm2: bool = False) -> PairAnalysis:
    """Assemble the full per-pair record; asserts the sum reconstruction."""
    from .lehmer import theorem2_rhs

    an = scaled_coords(pair, central, cfg)
    an.terms.central_imag = term_central_imag(pair, central, cfg)
    simp, unsimp = term_central_real(pair, central, cfg)
    an.terms.central_real = simp
    an.terms.central_real_unsimplified = unsimp
    an.terms.stirling = term_stirling(pair, central, cfg)
    ri, rr = term_rest(pair, zprime_zeros, central, cfg, covered_interval=zprime_interval)
    an.terms.rest_imag = ri
    an.terms.rest_real = rr
    if pair.pxi_lower is None or pair.pxi_upper is None:
        from .lehmer import strong_criterion

        strong_criterion(pair, cfg)
    an.strong_lhs = pair.strong_lhs
    with cfg.workprec():
        term_sum = (unsimp.value + an.terms.central_imag.value
                    + an.terms.stirling.value + ri.value + rr.value)
        an.window_residual = BigReal(an.strong_lhs.value - term_sum, cfg.prec_bits)
        # reconstruction identity, exact by construction
        recon = (simp.value + (unsimp.value - simp.value) + an.terms.central_imag.value
                 + an.terms.stirling.value + ri.value + rr.value
                 + an.window_residual.value)
        if abs(recon - an.strong_lhs.value) > mp.mpf(10) ** (-(cfg.working_digits - 4)) * max(
            abs(an.strong_lhs.value), mp.mpf(1)
        ):
            raise ConfigError("term reconstruction failed")
    if with_thm2:
        with cfg.workprec():
            gap = pair.delta.value
            rho_lo = mp.mpc(mp.mpf(1) / 2, pair.lower.gamma.value)
            rho_hi = mp.mpc(mp.mpf(1) / 2, pair.upper.gamma.value)
        an.thm2_lower = theorem2_rhs(rho_lo, cfg, nearest_zprime_dist=gap / 2)
        an.thm2_upper = theorem2_rhs(rho_hi, cfg, nearest_zprime_dist=gap / 2)
    return an


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass
class StatsReport:
    n_pairs: int
    n_lehmer: int
    n_strong: int
    n_borderline: int
    n_records: int
    corr_central_imag_rest_imag: float | None = None
    corr_central_real_stirling: float | None = None
    insufficient: bool = False

    def __str__(self):
        lines = [
            f"pairs: {self.n_pairs}",
            f"lehmer: {self.n_lehmer}",
            f"strong: {self.n_strong}",
            f"borderline: {self.n_borderline}",
            f"analysis records: {self.n_records}",
        ]
        if self.insufficient:
            lines.append("correlations: insufficient-data (need >= 10 records)")
        else:
            lines.append(
                f"corr(central_imag, rest_imag): {self.corr_central_imag_rest_imag:.6f}"
            )
            lines.append(
                f"corr(central_real, stirling): {self.corr_central_real_stirling:.6f}"
            )
        return "\n".join(lines)


def pearson(xs, ys) -> float:
    n = len(xs)
    if n < 2:
        raise InsufficientDataError("need at least 2 points")
    mx = mp.fsum(xs) / n
    my = mp.fsum(ys) / n
    sxy = mp.fsum([(a - mx) * (b - my) for a, b in zip(xs, ys)])
    sxx = mp.fsum([(a - mx) ** 2 for a in xs])
    syy = mp.fsum([(b - my) ** 2 for b in ys])
    if sxx == 0 or syy == 0:
        raise InsufficientDataError("zero variance")
    return float(sxy / mp.sqrt(sxx * syy))


def correlations(records: list[PairAnalysis], subset=None, pairs=None) -> StatsReport:
    """Pearson correlations of (central_imag, rest_imag) and of
    (central_real, stirling) over the filtered records, plus counts.

    Raises InsufficientDataError via the report flag when fewer than 10
    records survive the filter.
    """
    pairs = pairs if pairs is not None else [r.pair for r in records]
    n_lehmer = sum(1 for p in pairs if p.is_lehmer == YES)
    n_strong = sum(1 for p in pairs if p.is_strong == YES)
    n_border = sum(1 for p in pairs if p.is_lehmer == "borderline")
    sel = [r for r in records if subset is None or subset(r)]
    rep = StatsReport(
        n_pairs=len(pairs), n_lehmer=n_lehmer, n_strong=n_strong,
        n_borderline=n_border, n_records=len(sel),
    )
    if len(sel) < 10:
        rep.insufficient = True
        return rep
    rep.corr_central_imag_rest_imag = pearson(
        [r.terms.central_imag.value for r in sel],
        [r.terms.rest_imag.value for r in sel],
    )
    rep.corr_central_real_stirling = pearson(
        [r.terms.central_real.value for r in sel],
        [r.terms.stirling.value for r in sel],
    )
    return rep
