from .config import SuiteConfig
from .report import Row, SuiteReport, emit_report
from .suites import SUITES, run_suite

__all__ = ["SUITES", "Row", "SuiteConfig", "SuiteReport", "emit_report", "run_suite"]
