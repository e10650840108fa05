"""Independent oracles for the test suite.

Everything here deliberately avoids the library's own evaluation paths:
an Euler-Maclaurin zeta written from the classical formula, central finite
differences, brute-force inverse-square sums, and synthetic Hadamard
products with explicitly known factorizations.
"""

import mpmath as mp


def em_zeta(s, dps: int, n_terms: int | None = None, k_bernoulli: int = 30):
    """Euler-Maclaurin zeta, straight from the textbook formula.

    zeta(s) = sum_{n<N} n^-s + N^-s/2 + N^(1-s)/(s-1)
              + sum_k B_2k/(2k)! * rf(s, 2k-1) * N^(-s-2k+1)

    Run at `dps` working digits with N scaled to the height; independent of
    every code path in the package (and of mpmath's zeta).
    """
    with mp.workdps(dps):
        s = mp.mpc(s)
        N = n_terms or int(3 * abs(s.imag)) + 60
        head = mp.fsum([mp.power(n, -s) for n in range(1, N)], absolute=False)
        total = head + mp.power(N, -s) / 2 + mp.power(N, 1 - s) / (s - 1)
        for k in range(1, k_bernoulli + 1):
            term = (mp.bernoulli(2 * k) / mp.factorial(2 * k)
                    * mp.rf(s, 2 * k - 1) * mp.power(N, -s - 2 * k + 1))
            total += term
            if abs(term) < mp.mpf(10) ** (-(dps + 5)):
                break
        return total


def central_diff(f, x, order: int, h, dps: int):
    """Central finite differences at elevated precision."""
    with mp.workdps(dps):
        x = mp.mpf(x)
        h = mp.mpf(h)
        if order == 1:
            return (f(x + h) - f(x - h)) / (2 * h)
        if order == 2:
            return (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
        raise ValueError("order must be 1 or 2")


def brute_g(gammas, i: int, j: int):
    """Brute-force g for the pair (gammas[i], gammas[j]) over a complete
    synthetic set of positive ordinates, reflections included."""
    gm, gp = gammas[i], gammas[j]
    acc = mp.mpf(0)
    for k, g in enumerate(gammas):
        if k not in (i, j):
            acc += 1 / (g - gm) ** 2 + 1 / (g - gp) ** 2
        acc += 1 / (g + gm) ** 2 + 1 / (g + gp) ** 2
    return acc


class SyntheticProduct:
    """f(t) = prod (1 - t^2 / g^2): an even entire function with simple
    zeros at +-g, the synthetic stand-in for the completed zeta.

    At a zero w = g_j, writing f = (t - w) q(t), the factorization gives
    f'(w) = q(w), f''(w) = 2 q'(w), f'''(w) = 3 q''(w) with q explicit, so
    every pre-Schwarzian quantity has an exact closed form.
    """

    def __init__(self, gammas):
        self.gammas = [mp.mpf(g) for g in gammas]

    def all_zeros_except(self, w):
        out = []
        for g in self.gammas:
            if g != w:
                out.append(g)
            out.append(-g)
        return out

    def derivs_at_zero(self, j: int):
        """(f', f'', f''') at gammas[j], via the explicit factorization."""
        w = self.gammas[j]
        others = self.all_zeros_except(w)
        # f(t) = prod g^-2 * (-1)^n * prod_b (t - b); q strips the (t - w) factor
        logq = mp.fsum([mp.log(abs(w - b)) for b in others])
        sign = 1 if len(self.gammas) % 2 == 0 else -1
        for b in others:
            if w - b < 0:
                sign = -sign
        C = mp.fsum([-2 * mp.log(g) for g in self.gammas])
        q = sign * mp.exp(logq + C)
        s1 = mp.fsum([1 / (w - b) for b in others])
        s2 = mp.fsum([1 / (w - b) ** 2 for b in others])
        qp = q * s1
        qpp = q * (s1 ** 2 - s2)
        return q, 2 * qp, 3 * qpp

    def eval(self, t):
        t = mp.mpf(t)
        acc = mp.mpf(1)
        for g in self.gammas:
            acc *= (1 - t ** 2 / g ** 2)
        return acc
