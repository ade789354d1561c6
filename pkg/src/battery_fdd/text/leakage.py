"""
Leakage guard - descriptions must not carry label information
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Union

from ..alarms import AlarmRegistry
from ..errors import LeakageError

# Label vocabulary that never belongs in a description
LABEL_TERMS = ("alarm", "fault")


@dataclass
class LeakageCheck:
    """Outcome of a leakage scan"""
    passed: bool
    offending: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def leakage_check(
    text: str,
    registry: Union[AlarmRegistry, Iterable[str]],
    extra_terms: Iterable[str] = (),
) -> LeakageCheck:
    """
    Case-insensitive substring scan for label terms.

    Args:
        text: Rendered description
        registry: Alarm registry, or plain alarm names
        extra_terms: Additional forbidden terms

    Returns:
        LeakageCheck that fails iff any name or term occurs in text
    """
    names = registry.all_names() if isinstance(registry, AlarmRegistry) else list(registry)
    if not names:
        raise ValueError("leakage check needs a non-empty registry")

    lowered = text.lower()
    offending = []
    for term in list(names) + list(extra_terms):
        if term and term.lower() in lowered and term not in offending:
            offending.append(term)
    return LeakageCheck(passed=not offending, offending=offending)


def assert_leakage_free(
    text: str,
    registry: Union[AlarmRegistry, Iterable[str]],
    extra_terms: Iterable[str] = LABEL_TERMS,
) -> None:
    """Raise LeakageError when the scan fails"""
    result = leakage_check(text, registry, extra_terms)
    if not result.passed:
        raise LeakageError(result.offending)


__all__ = ["LABEL_TERMS", "LeakageCheck", "leakage_check", "assert_leakage_free"]
