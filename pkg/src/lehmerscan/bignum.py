"""Arbitrary-precision scalars that carry their working precision.

``BigReal`` and ``BigComplex`` wrap mpmath values together with the binary
precision they were computed at. Arithmetic between two wrapped operands is
performed at, and the result tagged with, the *minimum* of the two
precisions; this is the deterministic resolution rule used everywhere in the
toolkit. Unwrapped numbers (int, float, str, mpf, mpc) are treated as exact
inputs and do not lower the result precision.

The wrappers live at module boundaries (domain records, kernel outputs).
Inner numerical loops unwrap once via :func:`as_mpf` / :func:`as_mpc` and
work on raw mpmath values under an explicit ``mp.workprec``.
"""

from __future__ import annotations

import mpmath as mp

MIN_PRECISION_BITS = 64

_PLAIN = (int, float, str, mp.mpf, mp.mpc)


def digits_to_bits(digits: int) -> int:
    """Binary precision needed for the given count of decimal digits."""
    return max(MIN_PRECISION_BITS, int(digits * 3.3219280948873626) + 4)


def bits_to_digits(bits: int) -> int:
    return int(bits / 3.3219280948873626)


def as_mpf(x) -> mp.mpf:
    """Unwrap to a raw mpf. Strings are parsed at the current precision."""
    if isinstance(x, BigReal):
        return x.value
    if isinstance(x, mp.mpf):
        return x
    return mp.mpf(x)


def as_mpc(x) -> mp.mpc:
    if isinstance(x, (BigReal, BigComplex)):
        return mp.mpc(x.value)
    return mp.mpc(x)


def _coerce(other):
    """Return (raw value, precision or None) for a binary-op operand."""
    if isinstance(other, (BigReal, BigComplex)):
        return other.value, other.precision_bits
    if isinstance(other, _PLAIN):
        return other, None
    return NotImplemented, None


class BigReal:
    """A real scalar carrying the binary precision it was computed at."""

    __slots__ = ("value", "precision_bits")

    def __init__(self, value, precision_bits: int | None = None):
        if precision_bits is None:
            precision_bits = mp.mp.prec
        if precision_bits < MIN_PRECISION_BITS:
            raise ValueError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, got {precision_bits}"
            )
        self.precision_bits = int(precision_bits)
        with mp.workprec(self.precision_bits):
            v = mp.mpf(value.value if isinstance(value, BigReal) else value)
        self.value = v

    # -- arithmetic: min-precision resolution rule ---------------------------

    def _binop(self, other, op, reflected=False):
        raw, prec = _coerce(other)
        if raw is NotImplemented:
            return NotImplemented
        bits = self.precision_bits if prec is None else min(self.precision_bits, prec)
        a, b = (raw, self.value) if reflected else (self.value, raw)
        with mp.workprec(bits):
            out = op(a, b)
        cls = BigComplex if isinstance(out, mp.mpc) else BigReal
        return cls(out, bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: a - b, reflected=True)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: a / b, reflected=True)

    def __pow__(self, other):
        return self._binop(other, lambda a, b: a ** b)

    def __neg__(self):
        return BigReal(-self.value, self.precision_bits)

    def __abs__(self):
        return BigReal(abs(self.value), self.precision_bits)

    # -- comparisons on the underlying values --------------------------------

    def _cmpval(self, other):
        raw, _ = _coerce(other)
        return raw

    def __eq__(self, other):
        raw = self._cmpval(other)
        return NotImplemented if raw is NotImplemented else self.value == raw

    def __lt__(self, other):
        raw = self._cmpval(other)
        return NotImplemented if raw is NotImplemented else self.value < raw

    def __le__(self, other):
        raw = self._cmpval(other)
        return NotImplemented if raw is NotImplemented else self.value <= raw

    def __gt__(self, other):
        raw = self._cmpval(other)
        return NotImplemented if raw is NotImplemented else self.value > raw

    def __ge__(self, other):
        raw = self._cmpval(other)
        return NotImplemented if raw is NotImplemented else self.value >= raw

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"BigReal({mp.nstr(self.value, bits_to_digits(self.precision_bits))}, bits={self.precision_bits})"


class BigComplex:
    """A complex scalar carrying the binary precision it was computed at."""

    __slots__ = ("value", "precision_bits")

    def __init__(self, value, precision_bits: int | None = None):
        if precision_bits is None:
            precision_bits = mp.mp.prec
        if precision_bits < MIN_PRECISION_BITS:
            raise ValueError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, got {precision_bits}"
            )
        self.precision_bits = int(precision_bits)
        if isinstance(value, (BigReal, BigComplex)):
            value = value.value
        with mp.workprec(self.precision_bits):
            self.value = mp.mpc(value)

    @property
    def real(self) -> BigReal:
        return BigReal(self.value.real, self.precision_bits)

    @property
    def imag(self) -> BigReal:
        return BigReal(self.value.imag, self.precision_bits)

    def _binop(self, other, op, reflected=False):
        raw, prec = _coerce(other)
        if raw is NotImplemented:
            return NotImplemented
        bits = self.precision_bits if prec is None else min(self.precision_bits, prec)
        if isinstance(raw, (BigReal, BigComplex)):
            raw = raw.value
        a, b = (raw, self.value) if reflected else (self.value, raw)
        with mp.workprec(bits):
            out = op(a, b)
        return BigComplex(out, bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: a - b, reflected=True)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: a / b, reflected=True)

    def __neg__(self):
        return BigComplex(-self.value, self.precision_bits)

    def __abs__(self):
        return BigReal(abs(self.value), self.precision_bits)

    def __eq__(self, other):
        raw, _ = _coerce(other)
        return NotImplemented if raw is NotImplemented else self.value == raw

    def __hash__(self):
        return hash(self.value)

    def __complex__(self):
        return complex(self.value)

    def __repr__(self):
        return f"BigComplex({mp.nstr(self.value, bits_to_digits(self.precision_bits))}, bits={self.precision_bits})"
