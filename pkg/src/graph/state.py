"""State schema for the experiment pipeline."""
from typing import Literal, Optional, TypedDict

from src.models.schemas import ExperimentConfig, ResultTable


class WorkflowState(TypedDict, total=False):
    """Shared state across all LangGraph nodes."""

    # Input
    config_text: Optional[str]
    preset: Optional[str]
    overrides: list[str]
    out: Optional[str]

    # Parsed configuration
    experiment_config: ExperimentConfig

    # Results
    result_table: ResultTable
    oracle_failures: int
    output_path: Optional[str]
    csv_text: str

    # Execution metadata
    errors: list[dict]
    node_logs: list[dict]
    runtime_ms: int
    final_status: Literal["OK", "FAIL", "PENDING"]
    exit_code: int
