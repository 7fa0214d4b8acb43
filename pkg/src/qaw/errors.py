"""Exception hierarchy shared by every workbench module."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class WorkbenchError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 2


@dataclass(frozen=True)
class AxiomViolation:
    kind: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.kind} violated at {self.witness}"


class StructureError(WorkbenchError):
    """A candidate space or poset failed its axioms; carries every violation."""

    def __init__(self, violations: list[AxiomViolation]):
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(shown + more)


class BoundExceeded(WorkbenchError):
    exit_code = 3


class NotAChain(WorkbenchError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"elements {index} and {index + 1} are not related")


class InvalidTail(WorkbenchError):
    pass


class NonStabilizingChain(WorkbenchError):
    pass


class NotReflexive(WorkbenchError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"parallel pair {which} is not reflexive")


class UnknownLeaf(WorkbenchError):
    pass


class UnmappedVariable(WorkbenchError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not mapped")


class OpViolation(WorkbenchError):
    """An operation table breaks the structure of its carrier."""

    kind = "op"

    def __init__(self, symbol: str, witness: Any):
        self.symbol = symbol
        self.witness = witness
        super().__init__(f"{self.kind}: operation {symbol!r} fails at {witness}")


class OpNotNonexpanding(OpViolation):
    kind = "not nonexpanding"


class OpNotMonotone(OpViolation):
    kind = "not monotone"


class NotAHomomorphism(WorkbenchError):
    pass


class LawViolation(WorkbenchError):
    def __init__(self, law: str, witness: Any):
        self.law = law
        self.witness = witness
        super().__init__(f"{law} fails at {witness}")


class ModeMismatch(WorkbenchError):
    pass


class NotAnEMAlgebra(WorkbenchError):
    pass


class ArityBudgetExceeded(WorkbenchError):
    exit_code = 3


class NotAMember(WorkbenchError):
    def __init__(self, index: int, witness: Any):
        self.index = index
        self.witness = witness
        super().__init__(f"target {index} is not in the variety: {witness}")


class FreenessFailure(WorkbenchError):
    exit_code = 1

    def __init__(self, target: int, assignment: Any, reason: str):
        self.target = target
        self.assignment = assignment
        self.reason = reason
        super().__init__(f"target {target}, f={assignment}: {reason}")
