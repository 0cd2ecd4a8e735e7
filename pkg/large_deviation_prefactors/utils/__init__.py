"""
Utils package

Shared utilities.

Modules:
    - errors: UsageError / NumericalError hierarchy
    - settings: Environment defaults (LDP_ prefix)
    - io_utils: JSON and CSV serialization, run directories
    - decision_logger: Stage decision logging
"""

__all__ = ["decision_logger", "errors", "io_utils", "settings"]
