from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .errors import UnknownName


class Criterion(enum.Enum):
    """Consistency criteria, strongest first."""

    SER = "ser"
    SI = "si"
    PC = "pc"
    CC = "cc"
    RA = "ra"
    RC = "rc"

    @classmethod
    def parse(cls, name: "str | Criterion") -> "Criterion":
        if isinstance(name, Criterion):
            return name
        try:
            return cls(name.lower())
        except ValueError:
            raise UnknownName(f"unknown criterion {name!r}") from None

    @property
    def rank(self) -> int:
        """0 for the strongest criterion, increasing toward RC."""
        return list(Criterion).index(self)

    def __str__(self) -> str:
        return self.value.upper()


ALL_CRITERIA = tuple(Criterion)

VALID = "valid"
VIOLATION = "violation"


@dataclass
class Verdict:
    """Result of a check.

    ``evidence`` is either a cycle, a list of ``(tid, tid, label)`` edges, or a
    dict describing a failing axiom instance or the deepest prefix reached.
    """

    criterion: Criterion
    status: str
    witness: list[str] | None = None
    evidence: Any = None
    explored_states: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.status == VALID

    def __bool__(self) -> bool:
        return self.valid

    @classmethod
    def ok(cls, criterion, witness=None, **kw) -> "Verdict":
        return cls(criterion, VALID, witness=witness, **kw)

    @classmethod
    def violation(cls, criterion, evidence=None, **kw) -> "Verdict":
        return cls(criterion, VIOLATION, evidence=evidence, **kw)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"criterion": self.criterion.value, "status": self.status}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.evidence is not None:
            ev = self.evidence
            if isinstance(ev, list):
                ev = [list(e) if isinstance(e, tuple) else e for e in ev]
            out["evidence"] = ev
        out["explored_states"] = self.explored_states
        return out
