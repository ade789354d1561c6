"""
Diagnosis generators - remote chat-completion backend and deterministic fallback
"""

import asyncio
import logging
from abc import ABC, abstractmethod
from typing import Any, Awaitable, Callable, Dict, List, Optional

import openai
from pydantic import ValidationError

from ..config import BackendKind, GeneratorConfig
from ..errors import ConfigurationError, GenerationError
from ..models import DiagnosisDraft, DiagnosisOutput, EvidencePackage, GeneratedBy
from .circuit_breaker import CircuitBreaker, CircuitOpenError
from .fallback import deterministic_fallback
from .prompt import build_messages, repair_message

logger = logging.getLogger(__name__)

TRANSPORT_ERRORS = (openai.APIError, asyncio.TimeoutError, OSError)

Sleep = Callable[[float], Awaitable[None]]


class GeneratorBackend(ABC):
    """Produces a validated DiagnosisOutput from an evidence package"""

    kind: BackendKind

    @abstractmethod
    async def generate(self, pkg: EvidencePackage) -> DiagnosisOutput:
        pass

    async def aclose(self) -> None:
        pass


class FallbackBackend(GeneratorBackend):
    """Deterministic template backend; never fails on a valid package"""

    kind = BackendKind.FALLBACK

    def __init__(self, severity_notes: Optional[Dict[str, str]] = None):
        self.severity_notes = severity_notes or {}

    async def generate(self, pkg: EvidencePackage) -> DiagnosisOutput:
        return deterministic_fallback(pkg, self.severity_notes)


def check_consistency(draft: DiagnosisDraft, pkg: EvidencePackage) -> Optional[str]:
    """Reason the draft contradicts the package, or None"""
    if draft.predicted_alarm_code != pkg.predicted_alarm_code:
        return (
            f"predicted_alarm_code {draft.predicted_alarm_code} differs from "
            f"{pkg.predicted_alarm_code}"
        )
    if list(draft.activated_alarm_types) != list(pkg.alarm_names):
        return "activated_alarm_types must equal the listed alarm types exactly"
    return None


class RemoteBackend(GeneratorBackend):
    """
    OpenAI-compatible chat-completion backend.

    Features:
    - JSON-object responses validated against the diagnosis schema
    - Repair retries when a response fails validation or contradicts the evidence
    - Exponential backoff between transport retries
    - Circuit breaker shared across requests
    - Deterministic fallback after retries are exhausted (when enabled)
    """

    kind = BackendKind.REMOTE

    def __init__(
        self,
        config: GeneratorConfig,
        client: Optional[Any] = None,
        sleep: Sleep = asyncio.sleep,
        severity_notes: Optional[Dict[str, str]] = None,
    ):
        """
        Initialize remote backend.

        Args:
            config: Generator configuration
            client: Pre-built async client; one is created from config when None
            sleep: Awaitable used for backoff delays
            severity_notes: Alarm name to severity note mapping for the fallback

        Raises:
            ConfigurationError: no credential in the environment
        """
        self.config = config
        self._sleep = sleep
        self._severity_notes = severity_notes or {}
        self._breaker = CircuitBreaker(
            failure_threshold=config.failure_threshold,
            recovery_timeout=config.recovery_timeout,
            expected_exceptions=TRANSPORT_ERRORS,
        )
        if client is None:
            credential = config.resolve_credential()
            if credential is None:
                raise ConfigurationError(
                    f"remote backend needs a credential in ${config.credential_env}"
                )
            client = openai.AsyncOpenAI(
                api_key=credential.get_secret_value(),
                base_url=config.resolve_endpoint(),
                timeout=config.timeout_seconds,
                max_retries=0,
            )
        self._client = client

    @property
    def breaker(self) -> CircuitBreaker:
        return self._breaker

    def backoff_delay(self, attempt: int) -> float:
        return min(self.config.retry_delay_base * (2 ** min(attempt, 10)), self.config.retry_delay_max)

    async def _complete(self, messages: List[Dict[str, str]]) -> str:
        response = await asyncio.wait_for(
            self._client.chat.completions.create(
                model=self.config.model,
                messages=messages,
                temperature=0,
                response_format={"type": "json_object"},
            ),
            timeout=self.config.timeout_seconds,
        )
        return response.choices[0].message.content or ""

    async def generate(self, pkg: EvidencePackage) -> DiagnosisOutput:
        messages = build_messages(pkg)
        record_id = pkg.description.record_id
        attempts = 0

        for attempt in range(self.config.max_retries + 1):
            attempts += 1
            try:
                with self._breaker:
                    content = await self._complete(messages)
            except CircuitOpenError:
                logger.warning(f"Backend circuit open, skipping remote generation for {record_id}")
                break
            except TRANSPORT_ERRORS as e:
                logger.warning(
                    f"Backend request failed for {record_id} (attempt {attempts}): {type(e).__name__}"
                )
                if attempt < self.config.max_retries:
                    await self._sleep(self.backoff_delay(attempt))
                continue

            try:
                draft = DiagnosisDraft.model_validate_json(content)
                reason = check_consistency(draft, pkg)
            except ValidationError as e:
                reason = f"schema validation failed with {e.error_count()} errors"
                draft = None

            if reason is None and draft is not None:
                logger.debug(f"Remote diagnosis for {record_id} accepted after {attempts} attempts")
                return DiagnosisOutput(
                    **draft.model_dump(),
                    record_id=record_id,
                    generated_by=GeneratedBy.REMOTE,
                    attempts=attempts,
                )

            logger.debug(f"Rejected response for {record_id}: {reason}")
            messages = messages + [
                {"role": "assistant", "content": content},
                repair_message(pkg, reason),
            ]

        if not self.config.fallback_enabled:
            raise GenerationError(
                f"no valid diagnosis for {record_id} after {attempts} attempts and fallback is disabled"
            )
        logger.warning(f"Using deterministic fallback for {record_id} after {attempts} attempts")
        output = deterministic_fallback(pkg, self._severity_notes)
        return output.model_copy(update={"attempts": attempts})

    async def aclose(self) -> None:
        close = getattr(self._client, "close", None)
        if close is not None:
            await close()


def build_backend(
    config: GeneratorConfig,
    severity_notes: Optional[Dict[str, str]] = None,
) -> GeneratorBackend:
    """Backend selected by config.kind"""
    if config.kind == BackendKind.REMOTE:
        return RemoteBackend(config, severity_notes=severity_notes)
    return FallbackBackend(severity_notes)


async def generate(pkg: EvidencePackage, backend: GeneratorBackend) -> DiagnosisOutput:
    """Generate a diagnosis whose code and alarm types equal the package's"""
    output = await backend.generate(pkg)
    if check_consistency(output, pkg) is not None:
        raise GenerationError(f"backend {backend.kind.value} broke evidence consistency")
    return output


__all__ = [
    "TRANSPORT_ERRORS",
    "GeneratorBackend",
    "FallbackBackend",
    "RemoteBackend",
    "check_consistency",
    "build_backend",
    "generate",
]
