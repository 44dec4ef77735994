from __future__ import annotations

import contextvars

context_stage: contextvars.ContextVar[str | None] = contextvars.ContextVar(
    "context_stage",
    default=None,
)
