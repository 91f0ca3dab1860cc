"""Sweeps, recovery curves, reports and the invariant suites behind the CLI."""
from __future__ import annotations

from .config import ConfigError, SweepConfig, load_config
from .recovery import RecoveryPoint, isotonic_residual, recovery_curve
from .report import lowdegree_report
from .sweep import SweepRecord, read_csv, records_to_csv, regime_label, run_sweep, write_csv
from .verify import verify

__all__ = [
    "ConfigError", "SweepConfig", "load_config", "RecoveryPoint", "isotonic_residual",
    "recovery_curve", "lowdegree_report", "SweepRecord", "read_csv", "records_to_csv",
    "regime_label", "run_sweep", "write_csv", "verify",
]
