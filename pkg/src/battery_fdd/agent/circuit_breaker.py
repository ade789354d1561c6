"""
Circuit breaker for the remote generation backend
"""

import logging
import time
from typing import Callable, Optional, Tuple, Type

from ..errors import BackendError

logger = logging.getLogger(__name__)


class CircuitOpenError(BackendError):
    """Backend calls are suspended after repeated failures"""
    pass


class CircuitBreaker:
    """Circuit breaker for backend reliability (closed, open, half_open)"""

    def __init__(
        self,
        failure_threshold: int = 5,
        recovery_timeout: float = 60.0,
        expected_exceptions: Tuple[Type[BaseException], ...] = (Exception,),
        clock: Callable[[], float] = time.monotonic,
    ):
        self.failure_threshold = failure_threshold
        self.recovery_timeout = recovery_timeout
        self.expected_exceptions = expected_exceptions
        self._clock = clock

        self.failure_count = 0
        self.last_failure_time: Optional[float] = None
        self.state = "closed"

    def __enter__(self):
        if self.state == "open":
            if self._should_attempt_reset():
                self.state = "half_open"
                logger.info("Circuit breaker half-open, probing backend")
            else:
                raise CircuitOpenError("Circuit breaker is open")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            self._on_success()
        elif issubclass(exc_type, self.expected_exceptions):
            self._on_failure()
        return False

    @property
    def is_open(self) -> bool:
        return self.state == "open" and not self._should_attempt_reset()

    def _should_attempt_reset(self) -> bool:
        if self.last_failure_time is None:
            return True
        return self._clock() - self.last_failure_time >= self.recovery_timeout

    def _on_success(self):
        self.failure_count = 0
        self.state = "closed"

    def _on_failure(self):
        self.failure_count += 1
        self.last_failure_time = self._clock()

        if self.state == "half_open" or self.failure_count >= self.failure_threshold:
            if self.state != "open":
                logger.warning(f"Circuit breaker opened after {self.failure_count} failures")
            self.state = "open"


__all__ = ["CircuitOpenError", "CircuitBreaker"]
