"""Exception types shared across the package."""

from __future__ import annotations


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is out of its allowed range."""


class ComputationError(RuntimeError):
    """A numerical routine cannot produce a trustworthy result."""


class ConfigError(ValueError):
    """Configuration text failed to parse or validate.

    Carries every problem found, not just the first. ``problems`` is a list
    of ``(line_number, message)`` pairs; ``line_number`` is ``None`` for
    problems not tied to a specific line.
    """

    def __init__(self, problems: list[tuple[int | None, str]]):
        self.problems = list(problems)
        text = "; ".join(
            f"line {ln}: {msg}" if ln is not None else msg for ln, msg in self.problems
        )
        super().__init__(text)
