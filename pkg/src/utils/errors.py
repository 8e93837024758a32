"""Exception hierarchy for the simulator."""
from src.utils.config import config


class DepRepeaterError(Exception):
    """Base class for all simulator errors."""


class DomainError(DepRepeaterError, ValueError):
    """A parameter lies outside its mathematical domain."""


class UnsupportedStateError(DepRepeaterError, ValueError):
    """The requested representation cannot hold the given state."""


class ComputationError(DepRepeaterError, RuntimeError):
    """A formula hit a value that valid parameters cannot produce."""


class DegenerateSelectionError(DepRepeaterError, RuntimeError):
    """Post-selection accepted (numerically) nothing."""

    def __init__(self, p_succ: float):
        super().__init__(
            f"Distillation success probability {p_succ:.3e} is below {config.MIN_SUCCESS_PROBABILITY:.0e}"
        )
        self.p_succ = p_succ


class UnpurifiableError(DepRepeaterError):
    """Initial fidelity lies below the purification threshold."""

    def __init__(self, fidelity: float, threshold: float | None, mode: str):
        if threshold is None:
            message = f"{mode}: no improving region exists (unpurifiable-everywhere)"
        else:
            message = f"{mode}: fidelity {fidelity:.12g} is below the threshold {threshold:.12g}"
        super().__init__(message)
        self.fidelity = fidelity
        self.threshold = threshold
        self.mode = mode


class TargetUnreachableError(DepRepeaterError):
    """The target fidelity lies above the attractor of the round map."""

    def __init__(self, target: float, attractor: float, mode: str):
        super().__init__(
            f"{mode}: target {target:.12g} exceeds the attractor {attractor:.12g} (target-unreachable)"
        )
        self.target = target
        self.attractor = attractor
        self.mode = mode


class ChainCollapseError(DepRepeaterError):
    """A nesting level dropped below the purification threshold."""

    def __init__(self, level: int, fidelity: float, threshold: float):
        super().__init__(
            f"chain-collapse at level {level}: fidelity {fidelity:.12g} below threshold {threshold:.12g}"
        )
        self.level = level
        self.fidelity = fidelity
        self.threshold = threshold


class ConfigParseError(DepRepeaterError, ValueError):
    """An experiment configuration line could not be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
