from dataclasses import dataclass
from typing import Iterable

STATUSES = ("pass", "fail", "inconclusive")


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Unknown check status {self.status!r}")

    @classmethod
    def from_bool(cls, name: str, ok: bool, detail: str = "") -> "Check":
        return cls(name, "pass" if ok else "fail", detail)

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def run_status(checks: Iterable[Check]) -> str:
    """fail if any check fails, else inconclusive if any is, else pass."""
    statuses = {c.status for c in checks}
    if "fail" in statuses:
        return "fail"
    if "inconclusive" in statuses:
        return "inconclusive"
    return "pass"


EXIT_CODES = {"pass": 0, "fail": 1, "inconclusive": 3}
