"""
Orchestrators package

High-level workflow orchestration.

Modules:
    - pipeline: One step per subcommand, writing into the run directory
    - cli: The ldp command-line interface
"""

__all__ = ["cli", "pipeline"]
