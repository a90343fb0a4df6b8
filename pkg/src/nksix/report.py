"""Structured verification reports.

A report is a list of per-check records plus a config echo.  Rendering is
deterministic: two runs with the same configuration produce byte-identical
bodies.  Wall-clock timing is appended after the body, in a line marked as
excluded from the determinism contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["CheckRecord", "VerificationReport", "format_real"]


def format_real(x: float) -> str:
    """Decimal rendering with 17 significant digits (round-trips binary64)."""
    return f"{float(x):.17g}"


@dataclass
class CheckRecord:
    """Outcome of one verification check.

    ``anchor`` is the stable machine identifier of the check (dotted path);
    ``name`` is the human label.  A record with zero samples is vacuous and
    counts as failed.
    """

    name: str
    anchor: str
    samples: int
    max_defect: float
    tolerance: float
    note: str = ""

    @property
    def vacuous(self) -> bool:
        return self.samples <= 0

    @property
    def passed(self) -> bool:
        return not self.vacuous and self.max_defect <= self.tolerance


@dataclass
class VerificationReport:
    config: dict
    records: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def overall(self) -> bool:
        return bool(self.records) and all(r.passed for r in self.records)

    def body(self) -> str:
        lines = ["verification report", "==================="]
        for key, value in self.config.items():
            lines.append(f"{key:<10}: {value}")
        lines.append("")
        width = max([30] + [len(r.name) for r in self.records])
        header = f"{'check':<{width}} {'samples':>8} {'max defect':>12} {'tolerance':>11}  status"
        lines.append(header)
        lines.append("-" * len(header))
        for r in self.records:
            status = "vacuous" if r.vacuous else ("pass" if r.passed else "FAIL")
            lines.append(
                f"{r.name:<{width}} {r.samples:>8} {r.max_defect:>12.3e} {r.tolerance:>11.1e}  {status}"
            )
        lines.append("")
        passed = sum(1 for r in self.records if r.passed)
        lines.append(
            f"overall: {'PASS' if self.overall else 'FAIL'} ({passed}/{len(self.records)} checks)"
        )
        lines.append("")
        lines.append("[records]")
        for r in self.records:
            note = f" note={r.note}" if r.note else ""
            lines.append(
                f"record anchor={r.anchor} samples={r.samples}"
                f" max_defect={format_real(r.max_defect)}"
                f" tolerance={format_real(r.tolerance)}"
                f" pass={'true' if r.passed else 'false'}{note}"
            )
        lines.append(
            f"overall pass={'true' if self.overall else 'false'}"
            f" checks={len(self.records)}"
            f" failed={sum(1 for r in self.records if not r.passed)}"
        )
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        """Body plus the timing footer (the footer is excluded from the
        byte-identical determinism contract)."""
        return (
            self.body()
            + f"[timing] wall_seconds={self.seconds:.3f} (excluded from determinism)\n"
        )
