"""Three-valued search verdicts and bounded-search budgets.

Simulators and realizability deciders never report Reject/No unless the
search space was exhausted without hitting a bound; any truncation turns
a failed search into Unknown.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNKNOWN = "unknown"

    def __bool__(self):
        # guards against `if verdict:` sloppiness; force explicit comparison
        raise TypeError("Verdict is not boolean; compare against Verdict members")


@dataclass(frozen=True)
class SearchBounds:
    """Budgets for configuration searches over machines with unbounded tapes.

    max_configs caps distinct visited configurations, max_tape caps the
    pending write-tape length, max_blocks caps query blocks along a run.
    """

    max_configs: int = 200_000
    max_blocks: int = 32
    max_tape: int = 24

    def __post_init__(self):
        if self.max_configs < 1 or self.max_blocks < 0 or self.max_tape < 0:
            raise ValueError("search bounds must be positive")

    @classmethod
    def parse(cls, text: str) -> "SearchBounds":
        """Parse 'max-configs=N,max-blocks=N,max-tape=N' (all parts optional)."""
        kwargs = {}
        names = {"max-configs": "max_configs", "max-blocks": "max_blocks", "max-tape": "max_tape"}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, value = part.partition("=")
            if names.get(key) is None or not value.lstrip("-").isdigit():
                raise ValueError(f"bad bounds component {part!r}")
            kwargs[names[key]] = int(value)
        return cls(**kwargs)


DEFAULT_BOUNDS = SearchBounds()
