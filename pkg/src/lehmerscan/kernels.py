"""Arbitrary-precision evaluation kernels.

Everything the rest of the toolkit needs pointwise: zeta and its first three
derivatives, the log-derivatives of the Gamma-pi factor, the Hardy function
Z with its phase theta, the completed function Xi with derivatives up to
third order, the positive kernel Phi with certified series tails, the
Fourier-integral representation of Xi, and its heat-flow deformation.

Design notes
------------
* zeta values and derivatives are delegated to mpmath, which selects a
  Riemann-Siegel expansion with rigorous term bounds high on the critical
  strip and Euler-Maclaurin-class summation elsewhere. An independent
  Euler-Maclaurin implementation lives in the test suite as the oracle for
  this kernel, so the two routes never share code.
* Derivatives of analytic functions are alternatively computed by
  trapezoidal Cauchy contours (:func:`contour_derivs`). The trapezoid rule
  converges geometrically for analytic integrands; certification doubles the
  node count (reusing existing samples) until successive estimates agree.
* Xi-derivatives have two routes: "zeta" expands derivatives of
  xi = H * zeta through the product rule, with the log-derivatives of
  H(s) = s(s-1)/2 * pi^(-s/2) * Gamma(s/2) supplied analytically by
  digamma/trigamma/tetragamma; "contour" integrates xi values on a circle.
  The routes are cross-checked in the test suite; "zeta" is the default
  because it is an order of magnitude cheaper at large heights.
"""

from __future__ import annotations

from math import gcd

import mpmath as mp

from .bignum import BigComplex, BigReal, as_mpc, as_mpf
from .config import EvalConfig
from .errors import (
    ConfigError,
    ContourPoleError,
    OscillationError,
    PoleError,
    PrecisionError,
    RealityViolationError,
    TailBoundError,
)

_LN10 = 2.302585092994046


# ---------------------------------------------------------------------------
# zeta and derivatives
# ---------------------------------------------------------------------------

def zeta_raw(s, k: int = 0):
    """k-th derivative of zeta at s, raw mpmath value at current precision."""
    try:
        return mp.zeta(s, derivative=k) if k else mp.zeta(s)
    except (mp.libmp.NoConvergence, NotImplementedError) as exc:
        raise PrecisionError(f"zeta derivative {k} at {s}: {exc}") from exc


def eval_zeta(s, cfg: EvalConfig) -> BigComplex:
    """zeta(s) accurate to cfg.target_digits.

    Raises PoleError at s = 1 and PrecisionError if the backend cannot
    deliver the requested accuracy at this height.
    """
    with cfg.workprec():
        sv = as_mpc(s)
        if sv == 1:
            raise PoleError("zeta has its pole at s = 1")
        return BigComplex(zeta_raw(sv), cfg.prec_bits)


def contour_derivs(f, s0, max_order: int, radius, cfg: EvalConfig, nodes: int | None = None):
    """Derivatives f'(s0)..f^(max_order)(s0) by a trapezoidal Cauchy contour.

    Samples f on the circle |s - s0| = radius, doubling the node count (and
    reusing previous samples) until every order agrees between successive
    levels to the working tolerance, either relatively or below the
    quadrature's own rounding floor. Returns a list of raw mpc values of
    length max_order, starting at order 1.
    """
    s0 = as_mpc(s0)
    radius = as_mpf(radius)
    if radius <= 0:
        raise ConfigError("contour radius must be positive")
    n = nodes or cfg.contour_nodes
    rel_tol = mp.mpf(10) ** (-(cfg.target_digits + 2))
    cache: dict[tuple[int, int], mp.mpc] = {}

    def sample(j: int, m: int):
        g = gcd(j, m)
        key = (j // g, m // g)
        val = cache.get(key)
        if val is None:
            val = f(s0 + radius * mp.expjpi(mp.mpf(2 * key[0]) / key[1]))
            cache[key] = val
        return val

    def estimates(m: int):
        vals = [sample(j, m) for j in range(m)]
        maxf = max(abs(v) for v in vals)
        out = []
        for k in range(1, max_order + 1):
            acc = mp.fsum(
                [vals[j] * mp.expjpi(mp.mpf(-2 * j * k) / m) for j in range(m)],
                absolute=False,
            )
            out.append(mp.factorial(k) / (m * radius ** k) * acc)
        return out, maxf

    prev, maxf = estimates(n)
    floor_base = maxf * mp.mpf(10) ** (-(cfg.working_digits - 2))
    for _ in range(6):
        n *= 2
        cur, maxf = estimates(n)
        floor_base = maxf * mp.mpf(10) ** (-(cfg.working_digits - 2))
        ok = all(
            abs(a - b) <= max(rel_tol * abs(b), mp.factorial(k + 1) / radius ** (k + 1) * floor_base)
            for k, (a, b) in enumerate(zip(prev, cur))
        )
        if ok:
            return cur
        prev = cur
    raise PrecisionError(
        f"contour derivatives at {mp.nstr(s0, 8)} (radius {mp.nstr(radius, 5)}) "
        f"did not stabilize at {n} nodes"
    )


def eval_zeta_derivs(s, max_order: int, cfg: EvalConfig, route: str = "auto") -> list[BigComplex]:
    """[zeta'(s), ..., zeta^(max_order)(s)], each to cfg.target_digits.

    route "auto"/"backend" uses mpmath's certified derivative evaluation;
    route "contour" integrates eval_zeta values on a circle sized by the
    radius policy (and refuses circles enclosing the pole at s = 1).
    """
    if not 1 <= max_order <= 3:
        raise ConfigError("max_order must be in 1..3")
    with cfg.workprec():
        sv = as_mpc(s)
        if sv == 1:
            raise PoleError("zeta has its pole at s = 1")
        if route == "contour":
            r = cfg.contour_radius(sv.imag if sv.imag else 1)
            if abs(sv - 1) <= r:
                raise ContourPoleError(
                    f"derivative contour of radius {mp.nstr(r, 5)} around "
                    f"{mp.nstr(sv, 8)} encloses the pole at s = 1"
                )
            vals = contour_derivs(zeta_raw, sv, max_order, r, cfg)
        else:
            vals = [zeta_raw(sv, k) for k in range(1, max_order + 1)]
        return [BigComplex(v, cfg.prec_bits) for v in vals]


# ---------------------------------------------------------------------------
# the Gamma-pi factor and the completed factor
# ---------------------------------------------------------------------------

def eval_h_logderivs(s, cfg: EvalConfig) -> tuple[BigComplex, BigComplex]:
    """(h'/h, (h'/h)') at s for h(s) = pi^(-s/2) Gamma(s/2).

    Identically (-log(pi)/2 + psi(s/2)/2, psi'(s/2)/4).
    """
    with cfg.workprec():
        sv = as_mpc(s)
        if sv.imag == 0 and sv.real <= 0 and mp.isint(sv.real / 2):
            raise PoleError(f"Gamma(s/2) has a pole at s = {sv.real}")
        first = -mp.log(mp.pi) / 2 + mp.psi(0, sv / 2) / 2
        second = mp.psi(1, sv / 2) / 4
        return BigComplex(first, cfg.prec_bits), BigComplex(second, cfg.prec_bits)


def completed_logderivs(s):
    """(A, A', A'') for A = H'/H with H(s) = s(s-1)/2 * pi^(-s/2) * Gamma(s/2).

    Raw mpmath values at current precision. H is the factor completing zeta
    to xi, so these feed both the xi product rule and the exact form of the
    pre-Schwarzian identity at zeta zeros.
    """
    s = mp.mpc(s)
    a = 1 / s + 1 / (s - 1) - mp.log(mp.pi) / 2 + mp.psi(0, s / 2) / 2
    ap = -1 / s ** 2 - 1 / (s - 1) ** 2 + mp.psi(1, s / 2) / 4
    app = 2 / s ** 3 + 2 / (s - 1) ** 3 + mp.psi(2, s / 2) / 8
    return a, ap, app


def completed_factor(s):
    """H(s) = s(s-1)/2 * pi^(-s/2) * Gamma(s/2), raw value."""
    s = mp.mpc(s)
    return s * (s - 1) / 2 * mp.power(mp.pi, -s / 2) * mp.gamma(s / 2)


def xi_raw(s):
    """xi(s) = H(s) * zeta(s), raw value at current precision."""
    return completed_factor(s) * zeta_raw(s)


# ---------------------------------------------------------------------------
# Hardy Z and theta
# ---------------------------------------------------------------------------

def eval_Z_and_theta(t, cfg: EvalConfig) -> tuple[BigReal, BigReal]:
    """(Z(t), theta(t)) with Z real and |Z(t)| = |zeta(1/2 + it)|."""
    with cfg.workprec():
        tv = as_mpf(t)
        if tv <= 0:
            raise ConfigError("eval_Z_and_theta requires t > 0")
        try:
            z = mp.siegelz(tv)
            th = mp.siegeltheta(tv)
        except (mp.libmp.NoConvergence, NotImplementedError) as exc:
            raise PrecisionError(f"Z(t) at t={tv}: {exc}") from exc
        return BigReal(z, cfg.prec_bits), BigReal(th, cfg.prec_bits)


# ---------------------------------------------------------------------------
# Xi and derivatives
# ---------------------------------------------------------------------------

def _xi_derivs_zeta_route(s, kmax: int):
    """xi^(0..kmax)(s) via the product rule on H * zeta, raw values."""
    zs = [zeta_raw(s, k) for k in range(kmax + 1)]
    h0 = completed_factor(s)
    a, ap, app = completed_logderivs(s)
    hs = [h0, h0 * a, h0 * (a * a + ap), h0 * (a ** 3 + 3 * a * ap + app)]
    out = []
    for k in range(kmax + 1):
        out.append(mp.fsum([mp.binomial(k, j) * hs[j] * zs[k - j] for j in range(k + 1)],
                           absolute=False))
    return out


def _xi_derivs_contour_route(s, kmax: int, radius, cfg: EvalConfig):
    vals = [xi_raw(s)]
    if kmax:
        vals += contour_derivs(xi_raw, s, kmax, radius, cfg)
    return vals


def eval_Xi_and_derivs(t, max_order: int, cfg: EvalConfig,
                       nearest_zero_dist=None) -> list[BigReal]:
    """[Xi(t), Xi'(t), ..., Xi^(max_order)(t)], all real.

    Xi^(k)(t) = i^k xi^(k)(1/2 + it). Each value's imaginary residue is
    checked against 10^(-target_digits/2) relative to the value's own
    magnitude or, when the value sits at a zero, to the local Cauchy scale
    implied by the other derivatives; a violation raises
    RealityViolationError, otherwise the residue is discarded.
    """
    if not 0 <= max_order <= 3:
        raise ConfigError("max_order must be in 0..3")
    route = cfg.xi_route
    if route == "auto":
        route = "zeta"
    with cfg.workprec():
        tv = as_mpf(t)
        s = mp.mpc(mp.mpf(1) / 2, tv)
        r = cfg.contour_radius(tv, nearest_zero_dist)
        if route == "contour":
            xs = _xi_derivs_contour_route(s, max_order, r, cfg)
        else:
            xs = _xi_derivs_zeta_route(s, max_order)
        vals = [mp.mpc(1j) ** k * xs[k] for k in range(max_order + 1)]
        out = []
        thresh = mp.mpf(10) ** (-mp.mpf(cfg.target_digits) / 2)
        for k, v in enumerate(vals):
            scale = abs(v.real)
            for j, w in enumerate(vals):
                if j != k:
                    scale = max(scale, abs(w) * r ** (j - k)
                                * mp.factorial(k) / mp.factorial(j))
            if scale > 0 and abs(v.imag) > thresh * scale:
                raise RealityViolationError(
                    f"Xi^({k})({mp.nstr(tv, 10)}): imaginary residue "
                    f"{mp.nstr(abs(v.imag), 3)} exceeds {mp.nstr(thresh * scale, 3)}"
                )
            out.append(BigReal(v.real, cfg.prec_bits))
        return out


# ---------------------------------------------------------------------------
# Phi and the integral representations
# ---------------------------------------------------------------------------

def _phi_term(n, u):
    e2u = mp.exp(2 * u)
    return 2 * (2 * mp.pi ** 2 * n ** 4 * mp.exp(mp.mpf(9) * u / 2)
                - 3 * mp.pi * n ** 2 * mp.exp(mp.mpf(5) * u / 2)) * mp.exp(-n * n * mp.pi * e2u)


def phi_tail_bound(u, n_from: int):
    """Upper bound on sum_{n >= n_from} of the Phi series terms at u >= 0.

    Each term is below b_n = 4 pi^2 n^4 exp(9u/2 - n^2 pi exp(2u)), and
    b_{n+1}/b_n <= 16 exp(-3 pi) < 0.0013, so the geometric majorant of the
    first omitted term bounds the whole tail.
    """
    u = mp.mpf(u)
    n = mp.mpf(n_from)
    b = 4 * mp.pi ** 2 * n ** 4 * mp.exp(mp.mpf(9) * u / 2 - n * n * mp.pi * mp.exp(2 * u))
    return b / (1 - mp.mpf("0.0013"))


def eval_phi(u, n_max: int, cfg: EvalConfig | None = None) -> BigReal:
    """Partial sum of the Phi series to n_max terms with a certified tail.

    Returns the value only when the tail bound is below 10^(-target_digits);
    otherwise raises TailBoundError.
    """
    if n_max < 1:
        raise ConfigError("n_max must be positive")
    cfg = cfg or EvalConfig()
    with cfg.workprec():
        uv = as_mpf(u)
        if uv < 0:
            raise ConfigError("eval_phi requires u >= 0")
        total = mp.fsum([_phi_term(n, uv) for n in range(1, n_max + 1)])
        tail = phi_tail_bound(uv, n_max + 1)
        if tail >= cfg.tolerance():
            raise TailBoundError(
                f"Phi({mp.nstr(uv, 8)}): tail bound {mp.nstr(tail, 3)} with "
                f"n_max={n_max} exceeds 10^-{cfg.target_digits}"
            )
        return BigReal(total, cfg.prec_bits)


def _phi_truncation_point(cfg: EvalConfig, time_param=0):
    """u beyond which the (possibly heat-deformed) Phi integrand is below
    the working tolerance."""
    d = mp.mpf(cfg.working_digits + 5) * mp.log(10)
    tau = mp.mpf(time_param)
    u = mp.mpf(1)
    for _ in range(40):
        u = mp.log((d + mp.mpf(9) * u / 2 + max(tau, 0) * u * u + mp.log(4 * mp.pi ** 2)) / mp.pi) / 2
    return u


def eval_Xi_integral(t, cfg: EvalConfig) -> BigReal:
    """Xi(t) = 2 * integral_0^inf Phi(u) cos(ut) du, by direct quadrature.

    The independent oracle for the xi-route Xi. Practical only while the
    cosine oscillation is resolvable; |t| beyond cfg.xi_integral_max_t
    raises OscillationError. Even in t by construction.
    """
    with cfg.workprec():
        tv = abs(as_mpf(t))
        if tv > cfg.xi_integral_max_t:
            raise OscillationError(
                f"Phi-integral route unresolvable at |t| = {mp.nstr(tv, 6)}"
            )
        u_max = _phi_truncation_point(cfg)
        nseg = max(1, int(mp.ceil(u_max * tv / mp.pi)))
        points = [u_max * k / nseg for k in range(nseg + 1)]
        n_terms = max(4, int(mp.sqrt((cfg.working_digits * _LN10) / mp.pi)) + 2)

        def integrand(u):
            return mp.fsum([_phi_term(n, u) for n in range(1, n_terms + 1)]) * mp.cos(u * tv)

        val = 2 * mp.quad(integrand, points)
        return BigReal(val, cfg.prec_bits)


def eval_Xi_deformed(time_param, x, cfg: EvalConfig) -> BigReal:
    """Heat-flow deformation: integral_0^inf exp(tau u^2) Phi(u) cos(ux) du.

    At tau = 0 this equals Xi(x)/2. Requires tau <= 1/2 so the Gaussian
    factor stays dominated by Phi's decay.
    """
    with cfg.workprec():
        tau = as_mpf(time_param)
        xv = abs(as_mpf(x))
        if tau > mp.mpf(1) / 2:
            raise ConfigError("deformation time must be <= 1/2")
        if xv > cfg.xi_integral_max_t:
            raise OscillationError(
                f"deformed integral unresolvable at |x| = {mp.nstr(xv, 6)}"
            )
        u_max = _phi_truncation_point(cfg, tau)
        nseg = max(1, int(mp.ceil(u_max * xv / mp.pi)))
        points = [u_max * k / nseg for k in range(nseg + 1)]
        n_terms = max(4, int(mp.sqrt((cfg.working_digits * _LN10) / mp.pi)) + 2)

        def integrand(u):
            phi = mp.fsum([_phi_term(n, u) for n in range(1, n_terms + 1)])
            return mp.exp(tau * u * u) * phi * mp.cos(u * xv)

        val = mp.quad(integrand, points)
        return BigReal(val, cfg.prec_bits)
