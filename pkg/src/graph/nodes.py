"""LangGraph nodes for the experiment pipeline."""
import logging
import time

from pydantic import ValidationError

from src.experiments.output import emit_csv, render_csv
from src.experiments.parser import apply_overrides, parse_config
from src.experiments.presets import build_table, oracle_failures
from src.graph.state import WorkflowState
from src.utils.errors import DepRepeaterError
from src.utils.helpers import create_log_entry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ORACLE_FAILURE = 2


def _elapsed_ms(start_time: float) -> int:
    return int((time.time() - start_time) * 1000)


def _fail(state: WorkflowState, node: str, start_time: float, error: Exception, exit_code: int) -> WorkflowState:
    state["node_logs"] = state.get("node_logs", [])
    state["node_logs"].append(create_log_entry(node, "failed", _elapsed_ms(start_time), error=str(error)))
    state["errors"] = state.get("errors", []) + [{"node": node, "error": str(error)}]
    state["final_status"] = "FAIL"
    state["exit_code"] = exit_code
    logger.error("%s failed: %s", node, error)
    return state


def ingestor_node(state: WorkflowState) -> WorkflowState:
    """
    Assemble configuration text from file, preset and overrides, then validate it.

    Args:
        state: Current workflow state

    Returns:
        Updated state with the parsed ExperimentConfig
    """
    start_time = time.time()
    state["node_logs"] = state.get("node_logs", [])
    state["errors"] = []
    state["final_status"] = "PENDING"

    try:
        text = state.get("config_text")
        if text is None:
            preset = state.get("preset")
            if not preset:
                raise ValueError("either a configuration file or a preset is required")
            text = f"preset={preset}\n"

        overrides = list(state.get("overrides") or [])
        if state.get("out"):
            overrides.append(f"out={state['out']}")
        if overrides:
            text = apply_overrides(text, overrides)

        cfg = parse_config(text)
        state["experiment_config"] = cfg
        state["node_logs"].append(create_log_entry(
            "IngestorNode",
            "success",
            _elapsed_ms(start_time),
            preset=cfg.preset,
            override_count=len(overrides),
        ))
        return state

    except (DepRepeaterError, ValueError) as e:
        return _fail(state, "IngestorNode", start_time, e, EXIT_INVALID)


def runner_node(state: WorkflowState) -> WorkflowState:
    """Run the configured preset into a ResultTable."""
    start_time = time.time()

    try:
        table = build_table(state["experiment_config"])
        state["result_table"] = table
        state["node_logs"].append(create_log_entry(
            "RunnerNode",
            "success",
            _elapsed_ms(start_time),
            rows=len(table.rows),
            columns=len(table.columns),
        ))
        return state

    except (DepRepeaterError, ValidationError, ValueError) as e:
        return _fail(state, "RunnerNode", start_time, e, EXIT_INVALID)


def checker_node(state: WorkflowState) -> WorkflowState:
    """Gate on oracle comparisons; any failed row marks the run as failed."""
    start_time = time.time()
    failures = oracle_failures(state["result_table"])
    state["oracle_failures"] = failures
    if failures:
        state["final_status"] = "FAIL"
        state["exit_code"] = EXIT_ORACLE_FAILURE
        state["errors"] = state.get("errors", []) + [
            {"node": "CheckerNode", "error": f"{failures} oracle comparisons out of tolerance"}
        ]
    state["node_logs"].append(create_log_entry(
        "CheckerNode",
        "failed" if failures else "success",
        _elapsed_ms(start_time),
        oracle_failures=failures,
    ))
    return state


def emitter_node(state: WorkflowState) -> WorkflowState:
    """Write the CSV to the configured path, or keep it in state for stdout."""
    start_time = time.time()
    table = state["result_table"]
    out = state["experiment_config"].out

    try:
        if out:
            state["output_path"] = str(emit_csv(table, out))
        else:
            state["output_path"] = None
            state["csv_text"] = render_csv(table)
        state["node_logs"].append(create_log_entry(
            "EmitterNode",
            "success",
            _elapsed_ms(start_time),
            output_path=state["output_path"],
        ))
        return state

    except OSError as e:
        return _fail(state, "EmitterNode", start_time, e, EXIT_INVALID)


def finalizer_node(state: WorkflowState) -> WorkflowState:
    """
    Finalize the run: total runtime and exit status.

    Args:
        state: Current workflow state

    Returns:
        Final state with exit_code set
    """
    start_time = time.time()

    total_runtime = sum(log.get("duration_ms", 0) for log in state.get("node_logs", []))
    state["runtime_ms"] = total_runtime
    if state.get("final_status") != "FAIL":
        state["final_status"] = "OK"
        state["exit_code"] = EXIT_OK

    state["node_logs"].append(create_log_entry(
        "FinalizerNode",
        "success",
        _elapsed_ms(start_time),
        total_runtime_ms=total_runtime,
        final_status=state["final_status"],
    ))
    return state
