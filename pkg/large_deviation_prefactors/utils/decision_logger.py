"""
Decision Logger

Records stage decisions across a run. Each decision is saved as a ReasonLog JSON
file in {output_dir}/{run_id}/iter_{iteration}/reason_logs/.

Library code that runs inside hot loops never logs; orchestrating functions
(trainer loop boundaries, pipeline steps) do.
"""

import json
from pathlib import Path
from typing import Any

from large_deviation_prefactors.models.reason_log import ReasonLog


def log_decision(
    run_id: str,
    iteration: int,
    agent: str,
    decision: str,
    reasoning: str,
    parameters: dict[str, Any] | None = None,
    outcome: str | None = None,
    metadata: dict[str, Any] | None = None,
    output_dir: str = "runs",
) -> ReasonLog:
    """
    Log a stage decision to a ReasonLog JSON file.

    Args:
        run_id: Unique run identifier
        iteration: Epoch/step number (0 for non-iterative stages)
        agent: Stage name (Trainer, Field, PathIntegrator, Prefactor, MonteCarlo, Pipeline)
        decision: Brief description of the decision made
        reasoning: Explanation of why this decision was made
        parameters: Optional dict of numbers that influenced the decision
        outcome: Optional outcome or result of the decision
        metadata: Optional additional context
        output_dir: Base output directory for runs

    Returns:
        ReasonLog object that was created and saved

    Example:
        >>> log_decision(
        ...     run_id="doublewell-rot",
        ...     iteration=0,
        ...     agent="PathIntegrator",
        ...     decision="Path converged",
        ...     reasoning="Entered the delta_2 ball around the stable point",
        ...     parameters={"length": 3.41, "nodes": 3410},
        ... )
    """
    reason_log = ReasonLog(
        run_id=run_id,
        iteration=iteration,
        agent=agent,
        decision=decision,
        reasoning=reasoning,
        parameters=parameters or {},
        outcome=outcome,
        metadata=metadata or {},
    )

    log_dir = Path(output_dir) / run_id / f"iter_{iteration}" / "reason_logs"
    log_dir.mkdir(parents=True, exist_ok=True)

    timestamp = reason_log.timestamp.replace(":", "-").replace(".", "-").replace("+", "p")
    filepath = log_dir / f"{agent}_{timestamp}.json"
    # Same-agent decisions inside one clock tick must not overwrite each other
    suffix = 1
    while filepath.exists():
        filepath = log_dir / f"{agent}_{timestamp}_{suffix}.json"
        suffix += 1

    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(reason_log.model_dump(by_alias=True), f, indent=2)

    return reason_log


def load_decision_logs(
    run_id: str,
    iteration: int | None = None,
    agent: str | None = None,
    output_dir: str = "runs",
) -> list[ReasonLog]:
    """
    Load decision logs for a run, optionally filtered by iteration and/or agent.

    Args:
        run_id: Unique run identifier
        iteration: Optional iteration number to filter by
        agent: Optional agent name to filter by
        output_dir: Base output directory for runs

    Returns:
        List of ReasonLog objects matching the filters, in file-name order
    """
    logs: list[ReasonLog] = []
    run_dir = Path(output_dir) / run_id

    if not run_dir.exists():
        return logs

    if iteration is not None:
        iter_dirs = [run_dir / f"iter_{iteration}"]
    else:
        iter_dirs = sorted(run_dir.glob("iter_*"), key=lambda p: int(p.name.split("_")[1]))

    for iter_dir in iter_dirs:
        log_dir = iter_dir / "reason_logs"
        if not log_dir.exists():
            continue

        pattern = f"{agent}_*.json" if agent is not None else "*.json"
        for log_file in sorted(log_dir.glob(pattern)):
            with open(log_file, encoding="utf-8") as f:
                logs.append(ReasonLog(**json.load(f)))

    return logs
