"""
Jinja2 prompt templates shipped under ``src/oracle/prompts/<task>/``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .models import OracleRequest, TaskTag, canonical_json, contract_for

PROMPT_DIR = Path(__file__).parent / "prompts"

_ENV = Environment(
    loader=FileSystemLoader(str(PROMPT_DIR)),
    autoescape=False,
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=StrictUndefined,
)
_ENV.filters["json"] = lambda value: json.dumps(value, ensure_ascii=False, indent=2, default=str)
_ENV.filters["json_inline"] = lambda value: json.dumps(value, ensure_ascii=False, default=str)


def render_prompt(template: str, context: Mapping[str, Any]) -> Tuple[str, str]:
    system = _ENV.get_template(f"{template}/system.j2").render(**context).strip()
    user = _ENV.get_template(f"{template}/user.j2").render(**context).strip()
    return system, user


def build_request(task_tag: TaskTag, payload: Mapping[str, Any]) -> OracleRequest:
    """Render the task's templates over ``payload`` and attach its reply contract."""

    # Round-trip through JSON so the payload hashes the same after a restart.
    payload = json.loads(canonical_json(payload))
    system, user = render_prompt(task_tag.value, payload)
    return OracleRequest(
        task_tag=task_tag,
        system_text=system,
        user_text=user,
        response_contract=contract_for(task_tag),
        payload=payload,
    )


def build_repair_request(
    request: OracleRequest, previous_reply: str, problem: str
) -> OracleRequest:
    system, user = render_prompt(
        "repair",
        {
            "original_system": request.system_text,
            "original_user": request.user_text,
            "previous_reply": previous_reply,
            "problem": problem,
            "contract": request.response_contract,
        },
    )
    return OracleRequest(
        task_tag=request.task_tag,
        system_text=system,
        user_text=user,
        response_contract=request.response_contract,
        payload=request.payload,
    )
