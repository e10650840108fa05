"""Persistent zero caches: canonical line format, atomic writes, ingestion.

Zeta cache lines:   <index> <gamma-25-digits> <residual-exponent>
Zeta' cache lines:  <beta-25-digits> <gammap-25-digits> <residual-exponent> <certified:0|1>

Numbers are fixed 25-significant-digit lowercase scientific notation with a
'.' decimal separator, newline-terminated records, so identical data is
byte-identical on every platform. Header lines start with '#' and carry the
interval, precision, anchoring, a toolkit version, and a sha256 checksum of
the entry block; a checksum mismatch on load is a hard CacheError, never a
warning.

Ingestion accepts the canonical formats plus bare external tables
(one ordinate per line for zeta zeros; "beta gammap" pairs for zeta'
zeros), validates sortedness, and spot-checks residuals where the height is
within live-evaluation range.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import mpmath as mp

from .bignum import BigReal, digits_to_bits
from .config import EvalConfig
from .errors import CacheError, FormatError, ValidationError
from .zeroscan import ZetaZero
from .zprime import ZetaPrimeZero

TOOLKIT_VERSION = "lehmerscan-0.1.0"
STORED_DIGITS = 25
SPOT_CHECK_MAX_T = 1.0e7      # residual spot checks only below this height
SPOT_CHECK_COUNT = 5


def sci25(x) -> str:
    """Fixed 25-significant-digit lowercase scientific form of an mpf."""
    v = mp.mpf(x)
    if v == 0:
        return "0.000000000000000000000000e+0"
    return mp.nstr(v, STORED_DIGITS, min_fixed=1, max_fixed=1, strip_zeros=False)


def _exp10(x) -> int:
    """Decimal exponent of |x| (0 for x = 0), for residual columns."""
    v = abs(mp.mpf(x))
    if v == 0:
        return -999
    return int(mp.floor(mp.log10(v)))


@dataclass
class ZeroCache:
    """An on-disk collection of zeros of one kind over one interval."""

    kind: str                          # zeta | zprime
    interval: tuple[float, float]
    precision: int                     # target digits the entries carry
    entries: list = field(default_factory=list)
    provenance: str = "computed"       # computed | ingested
    anchored: str = "none"             # exact | inferred | none
    checksum: str = ""

    def __post_init__(self):
        if self.kind not in ("zeta", "zprime"):
            raise CacheError(f"unknown cache kind {self.kind!r}")

    # -- serialization --------------------------------------------------------

    def entry_lines(self) -> list[str]:
        lines = []
        if self.kind == "zeta":
            for i, z in enumerate(self.entries):
                idx = z.index if z.index is not None else i + 1
                lines.append(f"{idx} {sci25(z.gamma.value)} {_exp10(z.residual.value)}")
        else:
            for z in self.entries:
                cert = 1 if z.winding_certified else 0
                lines.append(
                    f"{sci25(z.beta.value)} {sci25(z.gammap.value)} "
                    f"{_exp10(z.residual.value)} {cert}"
                )
        return lines

    def render(self) -> str:
        body = self.entry_lines()
        digest = hashlib.sha256("\n".join(body).encode()).hexdigest()
        head = [
            f"# kind: {self.kind}",
            f"# interval: {sci25(self.interval[0])} {sci25(self.interval[1])}",
            f"# precision: {self.precision}",
            f"# provenance: {self.provenance}",
            f"# anchored: {self.anchored}",
            f"# version: {TOOLKIT_VERSION}",
            f"# count: {len(body)}",
            f"# checksum: {digest}",
        ]
        return "\n".join(head + body) + "\n"

    def write(self, path) -> Path:
        """Atomic write: temp file in the target directory, then rename."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = self.render()
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


def load_cache(path) -> ZeroCache:
    """Load and checksum-verify a canonical cache file."""
    path = Path(path)
    if not path.exists():
        raise CacheError(f"cache file {path} not found")
    headers = {}
    body = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        if raw.startswith("#"):
            try:
                key, val = raw[1:].split(":", 1)
            except ValueError:
                raise FormatError(f"malformed header {raw!r}", lineno)
            headers[key.strip()] = val.strip()
        elif raw.strip():
            body.append((lineno, raw))
    kind = headers.get("kind")
    if kind not in ("zeta", "zprime"):
        raise FormatError(f"missing or bad kind header in {path}")
    digest = hashlib.sha256("\n".join(r for _, r in body).encode()).hexdigest()
    if headers.get("checksum") and headers["checksum"] != digest:
        raise CacheError(f"checksum mismatch in {path}: file is corrupt")
    declared = headers.get("count")
    if declared is not None and int(declared) != len(body):
        raise CacheError(f"entry count mismatch in {path}")
    precision = int(headers.get("precision", STORED_DIGITS))
    bits = digits_to_bits(precision + 5)
    lo_s, hi_s = headers.get("interval", "0 0").split()
    provenance = headers.get("provenance", "computed")
    entries = []
    with mp.workprec(bits):
        interval = (float(mp.mpf(lo_s)), float(mp.mpf(hi_s)))
        for lineno, raw in body:
            parts = raw.split()
            try:
                if kind == "zeta":
                    idx, g, rexp = int(parts[0]), mp.mpf(parts[1]), int(parts[2])
                    entries.append(ZetaZero(
                        gamma=BigReal(g, bits),
                        residual=BigReal(mp.mpf(10) ** rexp, bits),
                        index=idx, provenance=provenance,
                        index_inferred=headers.get("anchored") == "inferred",
                    ))
                else:
                    if len(parts) != 4:
                        raise ValueError("expected 4 columns")
                    b, g = mp.mpf(parts[0]), mp.mpf(parts[1])
                    rexp, cert = int(parts[2]), int(parts[3])
                    entries.append(ZetaPrimeZero(
                        beta=BigReal(b, bits), gammap=BigReal(g, bits),
                        residual=BigReal(mp.mpf(10) ** rexp, bits),
                        winding_certified=bool(cert), provenance=provenance,
                    ))
            except (ValueError, IndexError) as exc:
                raise FormatError(str(exc), lineno)
    cache = ZeroCache(kind=kind, interval=interval, precision=precision,
                      entries=entries, provenance=provenance,
                      anchored=headers.get("anchored", "none"), checksum=digest)
    _validate_sorted(cache)
    return cache


def _validate_sorted(cache: ZeroCache):
    key = (lambda z: z.gamma.value) if cache.kind == "zeta" else (lambda z: z.gammap.value)
    prev = None
    for z in cache.entries:
        v = key(z)
        if prev is not None and v <= prev:
            raise ValidationError(
                f"{cache.kind} cache not strictly increasing near {mp.nstr(v, 15)}"
            )
        prev = v


def _spot_check(cache: ZeroCache, cfg: EvalConfig):
    """Residual spot checks on ingested entries within evaluable height."""
    candidates = [z for z in cache.entries
                  if float(z.gamma.value if cache.kind == "zeta" else z.gammap.value)
                  < SPOT_CHECK_MAX_T]
    if not candidates:
        return
    step = max(1, len(candidates) // SPOT_CHECK_COUNT)
    picked = candidates[::step][:SPOT_CHECK_COUNT]
    tol = mp.mpf(10) ** (-min(cfg.target_digits, cache.precision) + 3)
    with cfg.workprec():
        for z in picked:
            if cache.kind == "zeta":
                resid = abs(mp.siegelz(z.gamma.value))
                where = z.gamma.value
            else:
                resid = abs(mp.zeta(mp.mpc(z.beta.value, z.gammap.value), derivative=1))
                where = z.gammap.value
            if resid > tol:
                raise ValidationError(
                    f"spot check failed at {mp.nstr(where, 18)}: residual "
                    f"{mp.nstr(resid, 3)} exceeds {mp.nstr(tol, 3)}"
                )


def ingest(path, kind: str, cfg: EvalConfig) -> ZeroCache:
    """Read an external table (canonical or bare format) into a ZeroCache.

    Bare zeta tables carry one ordinate per line; bare zeta' tables carry
    "beta gammap" pairs. Sortedness is mandatory; residuals are spot-checked
    where the height allows live evaluation.
    """
    path = Path(path)
    if not path.exists():
        raise CacheError(f"ingest file {path} not found")
    kind_key = "zeta" if kind in ("zeta", "zeta_zeros") else "zprime"
    first = ""
    for raw in path.read_text().splitlines():
        if raw.strip():
            first = raw
            break
    if first.startswith("#"):
        cache = load_cache(path)
        if cache.kind != kind_key:
            raise ValidationError(
                f"{path} is a {cache.kind} cache, expected {kind_key}"
            )
        cache.provenance = "ingested"
        for i, z in enumerate(cache.entries):
            object.__setattr__(z, "provenance", "ingested")
        _spot_check(cache, cfg)
        return cache

    bits = digits_to_bits(STORED_DIGITS + 5)
    entries = []
    with mp.workprec(bits):
        for lineno, raw in enumerate(path.read_text().splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if kind_key == "zeta":
                    if len(parts) != 1:
                        raise ValueError(f"expected 1 column, got {len(parts)}")
                    entries.append(ZetaZero(
                        gamma=BigReal(mp.mpf(parts[0]), bits),
                        residual=BigReal(mp.mpf(1), bits),   # unknown: sentinel 10^0
                        provenance="ingested",
                    ))
                else:
                    if len(parts) != 2:
                        raise ValueError(f"expected 2 columns, got {len(parts)}")
                    entries.append(ZetaPrimeZero(
                        beta=BigReal(mp.mpf(parts[0]), bits),
                        gammap=BigReal(mp.mpf(parts[1]), bits),
                        residual=BigReal(mp.mpf(1), bits),
                        winding_certified=False,
                        provenance="ingested",
                    ))
            except ValueError as exc:
                raise FormatError(str(exc), lineno)
    if not entries:
        raise ValidationError(f"no entries in {path}")
    if kind_key == "zeta":
        lo = float(entries[0].gamma.value)
        hi = float(entries[-1].gamma.value)
    else:
        lo = float(entries[0].gammap.value)
        hi = float(entries[-1].gammap.value)
    cache = ZeroCache(kind=kind_key, interval=(lo, hi), precision=STORED_DIGITS,
                      entries=entries, provenance="ingested")
    _validate_sorted(cache)
    _spot_check(cache, cfg)
    return cache


def cache_path(cache_dir, kind: str) -> Path:
    name = {"zeta": "zeta_zeros.cache", "zprime": "zprime_zeros.cache"}[kind]
    return Path(cache_dir) / name
