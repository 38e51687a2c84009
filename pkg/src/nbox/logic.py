from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class LogicId:
    """Which logic: the axiom scheme ``[]^n phi -> []^m phi`` plus optional rules.

    ``rosbox`` enables ``~[]phi / ~[][]phi``; ``ros`` enables ``~phi / ~[]phi``
    and is only meaningful to the proof checker.
    """

    m: int
    n: int
    rosbox: bool = False
    ros: bool = False

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("m and n must be natural numbers")

    @property
    def name(self) -> str:
        base = f"A_{{{self.m},{self.n}}}"
        if self.ros:
            return "NR" + base + ("+RosBox" if self.rosbox else "")
        return ("N+" if self.rosbox else "N") + base

    @property
    def rosbox_admissible(self) -> bool:
        """True when adding the RosBox rule does not change the theorems."""
        return self.m >= 1 or self.n <= 1

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "rosbox": self.rosbox, "ros": self.ros}

    @classmethod
    def from_json(cls, obj: dict) -> "LogicId":
        try:
            m, n = obj["m"], obj["n"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed logic: {obj!r}") from exc
        if not (isinstance(m, int) and isinstance(n, int)) or isinstance(m, bool) or isinstance(n, bool):
            raise ValueError(f"malformed logic: {obj!r}")
        return cls(m, n, bool(obj.get("rosbox", False)), bool(obj.get("ros", False)))


N = LogicId(1, 1)
N4 = LogicId(2, 1)
