"""
OpenAI-compatible chat-completions transport.
"""

from __future__ import annotations

from typing import Any, Optional

from openai import OpenAI

from src.config import OpenAISettings

from .models import OracleRequest
from .transports import OracleTransport, TransportReply, estimate_units


class OpenAIChatTransport(OracleTransport):
    """Chat completions in JSON-object mode. Retries are handled by the gateway."""

    name = "openai-chat"

    def __init__(
        self,
        *,
        api_key: str,
        model: str,
        api_base: str | None = None,
        client: Optional[Any] = None,
    ) -> None:
        if client is None:
            client_kwargs = {"api_key": api_key, "max_retries": 0}
            if api_base:
                client_kwargs["base_url"] = api_base
            client = OpenAI(**client_kwargs)
        self._client = client
        self.model_name = model

    @classmethod
    def from_settings(
        cls,
        settings: OpenAISettings,
        *,
        model: Optional[str] = None,
        endpoint: Optional[str] = None,
    ) -> "OpenAIChatTransport":
        return cls(
            api_key=settings.api_key,
            model=model or settings.chat_model,
            api_base=endpoint or settings.api_base,
        )

    def complete(self, request: OracleRequest) -> TransportReply:
        response = self._client.chat.completions.create(
            model=self.model_name,
            messages=[
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            response_format={"type": "json_object"},
        )
        text = response.choices[0].message.content or ""
        usage = getattr(response, "usage", None)
        if usage is not None:
            return TransportReply(text, int(usage.prompt_tokens), int(usage.completion_tokens))
        return TransportReply(
            text, estimate_units(request.system_text + request.user_text), estimate_units(text)
        )
