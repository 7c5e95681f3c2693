"""Structured results shared by the verification engine and the CLI.

Every check reports three numbers: the residual, the analytic tolerance,
and the truncation budget it consumed.  A check passes iff
residual <= tolerance + budget; truncation error is never folded into a
fudge factor.  ``runtime_s`` is informational and is kept out of the
canonical JSON report so identical configs produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    """Outcome of one property check (or a family of labelled lines)."""

    name: str
    params: dict
    residuals: dict[str, float]
    tolerance: float
    budget: float = 0.0
    asserting: bool = True
    notes: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    @property
    def worst(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        if not self.asserting:
            return True
        return all(r <= self.tolerance + self.budget for r in self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "type": "verification",
            "name": self.name,
            "params": self.params,
            "residuals": dict(sorted(self.residuals.items())),
            "worst_residual": self.worst,
            "tolerance": self.tolerance,
            "truncation_budget": self.budget,
            "asserting": self.asserting,
            "passed": self.passed,
            "notes": list(self.notes),
            "extra": self.extra,
        }


@dataclass
class ResolutionReport:
    """Outcome of one resolution-of-unity Gram check."""

    family: str
    measure: str
    probe: list[int]
    gram_deviation: float
    expected: str                 # identity | parity_projector_* | sector_projector
    tolerance: float
    node_counts: dict = field(default_factory=dict)
    negative_control: bool = False
    notes: tuple[str, ...] = ()
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        if self.negative_control:
            # the documented expectation is that the family does NOT
            # reproduce the target; large deviation is the pass condition
            return self.gram_deviation >= self.tolerance
        return self.gram_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "type": "resolution",
            "family": self.family,
            "measure": self.measure,
            "probe": list(self.probe),
            "gram_deviation": self.gram_deviation,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "node_counts": self.node_counts,
            "negative_control": self.negative_control,
            "passed": self.passed,
            "notes": list(self.notes),
        }


@dataclass
class Table:
    """A small named table destined for CSV output and plotting."""

    name: str
    header: list[str]
    rows: list[list]

    def to_dict(self) -> dict:
        return {"name": self.name, "header": list(self.header),
                "rows": [list(r) for r in self.rows]}
