"""Evaluation and pipeline configuration.

``EvalConfig`` governs the numerical kernels: requested accuracy, guard
digits, and the contour policy for derivatives. ``ScanConfig`` is the
pipeline-level configuration built by the CLI from a ``key=value`` file plus
flag overrides.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import mpmath as mp

from .bignum import digits_to_bits
from .errors import ConfigError


def default_contour_radius(t, nearest_zero_dist=None):
    """Contour radius at ordinate t: min(0.05, 1/log t), and never more than
    half the distance to the nearest known zero."""
    t = abs(mp.mpf(t))
    r = mp.mpf("0.05") if t <= mp.e else min(mp.mpf("0.05"), 1 / mp.log(t))
    if nearest_zero_dist is not None and nearest_zero_dist > 0:
        r = min(r, mp.mpf(nearest_zero_dist) / 2)
    return r


@dataclass(frozen=True)
class EvalConfig:
    """Kernel evaluation settings.

    Working precision is target_digits + guard_digits converted to bits;
    certification failures double the guard budget up to max_retries times
    before raising PrecisionError.
    """

    target_digits: int = 25
    guard_digits: int = 10
    contour_nodes: int = 32
    max_retries: int = 4
    # Route for Xi-derivatives: "zeta" expands xi-derivatives through the
    # completed-factor product rule on top of certified zeta derivatives;
    # "contour" integrates xi values on a circle. "auto" = "zeta".
    xi_route: str = "auto"
    # Largest |t| that the oscillatory Phi-integral representation resolves.
    xi_integral_max_t: float = 200.0

    def __post_init__(self):
        if self.target_digits < 1:
            raise ConfigError("target_digits must be positive")
        if self.guard_digits < 10:
            raise ConfigError("guard_digits must be >= 10")
        if self.contour_nodes < 4:
            raise ConfigError("contour_nodes must be >= 4")
        if self.xi_route not in ("auto", "zeta", "contour"):
            raise ConfigError(f"unknown xi_route {self.xi_route!r}")

    @property
    def working_digits(self) -> int:
        return self.target_digits + self.guard_digits

    @property
    def prec_bits(self) -> int:
        return digits_to_bits(self.working_digits)

    def workprec(self):
        return mp.workprec(self.prec_bits)

    def tolerance(self) -> mp.mpf:
        return mp.mpf(10) ** (-self.target_digits)

    def escalated(self, attempt: int) -> "EvalConfig":
        """Config with the guard budget doubled `attempt` times."""
        return replace(self, guard_digits=self.guard_digits * (2 ** attempt))

    def contour_radius(self, t, nearest_zero_dist=None):
        return default_contour_radius(t, nearest_zero_dist)


_EMIT_CHOICES = {"pairs", "analysis", "histograms", "stats", "phase_grid"}


@dataclass
class ScanConfig:
    """End-to-end pipeline configuration (one scan/detect/analyze run)."""

    t_lo: float = 0.0
    t_hi: float = 0.0
    target_digits: int = 25
    g_window_gaps: int = 50
    sigma_max_rule: str = "0.5 + 4/log(t)"
    emit: set = field(default_factory=lambda: {"pairs", "analysis", "stats"})
    cache_dir: Path = Path("cache")
    ingest: list = field(default_factory=list)  # (path, kind) tuples
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    slice_limit: int | None = None  # bound pair count for CI slices
    guard_digits: int = 10

    def validate(self):
        if not self.t_lo < self.t_hi:
            raise ConfigError(f"t_lo must be < t_hi (got {self.t_lo}, {self.t_hi})")
        if self.target_digits < 15:
            raise ConfigError("target_digits must be >= 15")
        if self.g_window_gaps < 10:
            raise ConfigError("g_window_gaps must be >= 10")
        bad = self.emit - _EMIT_CHOICES
        if bad:
            raise ConfigError(f"unknown emit targets: {sorted(bad)}")
        for _, kind in self.ingest:
            if kind not in ("zeta_zeros", "zprime_zeros"):
                raise ConfigError(f"unknown ingest kind {kind!r}")
        return self

    def eval_config(self) -> EvalConfig:
        return EvalConfig(target_digits=self.target_digits, guard_digits=self.guard_digits)

    def sigma_max(self, t: float) -> float:
        """Evaluate the sigma_max rule at ordinate t (rule uses 'log', 't')."""
        try:
            return float(
                eval(  # noqa: S307 - rule comes from local config, documented surface
                    self.sigma_max_rule,
                    {"__builtins__": {}},
                    {"log": mp.log, "t": mp.mpf(t), "min": min, "max": max},
                )
            )
        except Exception as exc:
            raise ConfigError(f"bad sigma_max rule {self.sigma_max_rule!r}: {exc}") from exc


def load_config_file(path) -> dict:
    """Parse a key=value config file; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def scan_config_from_mapping(kv: dict) -> ScanConfig:
    """Build a ScanConfig from string key/value pairs (file or CLI)."""
    cfg = ScanConfig()
    for key, val in kv.items():
        if key in ("t_lo", "t_hi"):
            setattr(cfg, key, float(val))
        elif key in ("target_digits", "g_window_gaps", "workers", "guard_digits"):
            setattr(cfg, key, int(val))
        elif key == "slice_limit":
            cfg.slice_limit = int(val)
        elif key == "sigma_max_rule":
            cfg.sigma_max_rule = val
        elif key == "emit":
            cfg.emit = {e.strip() for e in val.split(",") if e.strip()}
        elif key == "cache_dir":
            cfg.cache_dir = Path(val)
        elif key == "ingest":
            # path:kind entries separated by commas
            for entry in val.split(","):
                path, _, kind = entry.strip().rpartition(":")
                cfg.ingest.append((Path(path), kind))
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return cfg
