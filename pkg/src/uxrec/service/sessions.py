"""The per-project session record the service persists."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import IndexSet
from ..errors import ValidationError

PROJECT_STATUSES = ("brainstorming", "designing the study", "implementing", "evaluating")


@dataclass
class ProjectSession:
    id: str
    name: str
    statuses: list[str]
    description: str
    initial_plan: str = ""
    initial_outcome: str = ""
    current_indexes: IndexSet = field(default_factory=IndexSet)
    current_recommendation: dict | None = None
    cart: list[str] = field(default_factory=list)
    selected_outcomes: list[str] = field(default_factory=list)
    accepted_risks: list[str] = field(default_factory=list)
    generated_plan: str | None = None
    generated_plan_warnings: list[str] = field(default_factory=list)
    generated_ux_outcome: dict | None = None
    diff_history: list[dict] = field(default_factory=list)
    revision: int = 0

    def __post_init__(self):
        bad = [s for s in self.statuses if s not in PROJECT_STATUSES]
        if bad:
            raise ValidationError(f"unknown project statuses {bad!r}")
        if not self.description.strip():
            raise ValidationError("description must be non-empty")

    def recommended_names(self) -> list[str]:
        if not self.current_recommendation:
            return []
        return [m["name"] for m in self.current_recommendation["metrics"]]

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "id": self.id,
            "name": self.name,
            "statuses": list(self.statuses),
            "description": self.description,
            "initial_plan": self.initial_plan,
            "initial_outcome": self.initial_outcome,
            "current_indexes": self.current_indexes.to_dict(),
            "current_recommendation": self.current_recommendation,
            "cart": sorted(self.cart),
            "selected_outcomes": list(self.selected_outcomes),
            "accepted_risks": list(self.accepted_risks),
            "generated_plan": self.generated_plan,
            "generated_plan_warnings": list(self.generated_plan_warnings),
            "generated_ux_outcome": self.generated_ux_outcome,
            "diff_history": list(self.diff_history),
            "revision": self.revision,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ProjectSession":
        return cls(
            id=raw["id"],
            name=raw.get("name", ""),
            statuses=list(raw.get("statuses", [])),
            description=raw["description"],
            initial_plan=raw.get("initial_plan", ""),
            initial_outcome=raw.get("initial_outcome", ""),
            current_indexes=IndexSet.from_dict(raw.get("current_indexes", {})),
            current_recommendation=raw.get("current_recommendation"),
            cart=list(raw.get("cart", [])),
            selected_outcomes=list(raw.get("selected_outcomes", [])),
            accepted_risks=list(raw.get("accepted_risks", [])),
            generated_plan=raw.get("generated_plan"),
            generated_plan_warnings=list(raw.get("generated_plan_warnings", [])),
            generated_ux_outcome=raw.get("generated_ux_outcome"),
            diff_history=list(raw.get("diff_history", [])),
            revision=int(raw.get("revision", 0)),
        )
