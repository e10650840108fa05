import mpmath as mp
import pytest

from lehmerscan.bignum import BigReal, digits_to_bits
from lehmerscan.config import EvalConfig
from lehmerscan.zeroscan import ZetaZero
from lehmerscan.zprime import ZetaPrimeZero


def mk_real(s: str, digits: int = 40) -> BigReal:
    bits = digits_to_bits(digits)
    with mp.workprec(bits):
        return BigReal(mp.mpf(s), bits)


def mk_zero(gamma: str, digits: int = 40, index=None) -> ZetaZero:
    bits = digits_to_bits(digits)
    with mp.workprec(bits):
        return ZetaZero(gamma=BigReal(mp.mpf(gamma), bits),
                        residual=BigReal(mp.mpf("1e-30"), bits), index=index)


def mk_zprime(beta: str, gammap: str, digits: int = 40) -> ZetaPrimeZero:
    bits = digits_to_bits(digits)
    with mp.workprec(bits):
        return ZetaPrimeZero(beta=BigReal(mp.mpf(beta), bits),
                             gammap=BigReal(mp.mpf(gammap), bits),
                             residual=BigReal(mp.mpf("1e-30"), bits),
                             winding_certified=True)


@pytest.fixture(scope="session")
def cfg25():
    return EvalConfig(target_digits=25)


@pytest.fixture(scope="session")
def cfg15():
    return EvalConfig(target_digits=15)


@pytest.fixture(scope="session")
def low_zeros(cfg25):
    """Zeros up to t = 250 (covers the first 100), scanned once per session."""
    from lehmerscan.zeroscan import scan_zeros

    zeros, report = scan_zeros(10.5, 250.0, cfg25, workers=2)
    assert report.passed
    return zeros


@pytest.fixture(scope="session")
def lehmer_region(cfg25):
    """Zeros on (6958, 7052): the near-counterexample pair with full
    50-gap classification windows."""
    from lehmerscan.zeroscan import scan_zeros

    zeros, report = scan_zeros(6958.0, 7052.0, cfg25, workers=2)
    assert report.passed
    return zeros, (6958.0, 7052.0)


@pytest.fixture(scope="session")
def lehmer_pair(lehmer_region):
    from lehmerscan.lehmer import ZeroPair

    zeros, interval = lehmer_region
    idx = next(i for i, z in enumerate(zeros)
               if abs(float(z.gamma.value) - 7005.0628) < 0.01)
    return ZeroPair(lower=zeros[idx], upper=zeros[idx + 1])


@pytest.fixture(scope="session")
def zprime_7005(cfg25):
    """zeta' zeros covering the theorem-3 window around the 7005 pair."""
    from lehmerscan.zprime import find_zprime_zeros

    zp = find_zprime_zeros(7004.2, 7006.0, cfg25, workers=2)
    return zp, (7004.2, 7006.0)
