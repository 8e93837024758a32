"""LangGraph workflow for experiment runs."""
from langgraph.graph import END, StateGraph

from src.graph.nodes import (
    checker_node,
    emitter_node,
    finalizer_node,
    ingestor_node,
    runner_node,
)
from src.graph.state import WorkflowState


def should_run(state: WorkflowState) -> str:
    """Skip to finalize when the configuration was rejected."""
    if state.get("final_status") == "FAIL":
        return "finalize"
    return "run"


def should_check(state: WorkflowState) -> str:
    if state.get("final_status") == "FAIL":
        return "finalize"
    return "check"


def create_workflow() -> StateGraph:
    """
    Create the LangGraph workflow for one experiment run.

    Workflow:
    START → Ingestor → [invalid?] → Finalizer
                        ↓ [valid]
                      Runner → [failed?] → Finalizer
                        ↓
                      Checker
                        ↓
                      Emitter
                        ↓
                      Finalizer → END
    """
    workflow = StateGraph(WorkflowState)

    workflow.add_node("ingest", ingestor_node)
    workflow.add_node("run", runner_node)
    workflow.add_node("check", checker_node)
    workflow.add_node("emit", emitter_node)
    workflow.add_node("finalize", finalizer_node)

    workflow.set_entry_point("ingest")

    workflow.add_conditional_edges(
        "ingest",
        should_run,
        {
            "run": "run",
            "finalize": "finalize"
        }
    )
    workflow.add_conditional_edges(
        "run",
        should_check,
        {
            "check": "check",
            "finalize": "finalize"
        }
    )

    # Failed oracle checks still emit their table
    workflow.add_edge("check", "emit")
    workflow.add_edge("emit", "finalize")
    workflow.add_edge("finalize", END)

    return workflow.compile()


# Create compiled workflow instance
experiment_workflow = create_workflow()
