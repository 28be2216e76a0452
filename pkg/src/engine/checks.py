"""Check reports shared by the validation and verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Type

from src.core.shared.exceptions import AppBaseException, ValidationError


@dataclass(frozen=True)
class Finding:
    """One violated invariant, with enough context to locate it."""

    code: str
    message: str
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.context}


@dataclass
class CheckReport:
    """Outcome of a validation or identity check: ok, or the list of findings."""

    name: str
    findings: List[Finding] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, code: str, message: str, **context: Any) -> None:
        self.findings.append(Finding(code, message, context))

    def first(self) -> Optional[Finding]:
        return self.findings[0] if self.findings else None

    def raise_if_failed(
        self,
        exc_class: Type[AppBaseException] = ValidationError,
        detail: Optional[str] = None,
    ) -> None:
        if self.ok:
            return
        raise exc_class(
            detail=detail or f"{self.name}: {self.findings[0].message}",
            context={
                "check": self.name,
                "violations": [f.to_dict() for f in self.findings],
            },
        )

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "check": self.name,
            "ok": self.ok,
            "violations": [f.to_dict() for f in self.findings],
        }
        if self.details:
            result["details"] = self.details
        return result
