import logging
from collections.abc import MutableMapping
from typing import Any, TypeVar

from quasicut.core.context import context_stage

T = TypeVar("T", bound=logging.Logger | logging.LoggerAdapter[Any])

TRACE_LEVEL = logging.DEBUG - 5


class LoggerAdapterWithTrace(logging.LoggerAdapter[T]):
    def trace(self, *args, **kwargs) -> None:  # noqa: ANN002, ANN003
        try:
            self.log(TRACE_LEVEL, *args, **kwargs)  # type: ignore
        except Exception as e:
            print(e, args, kwargs)


class StageLoggerAdapter(LoggerAdapterWithTrace[T]):
    """Adds the pipeline stage running at emit time to every record."""

    def process(
        self,
        msg: Any,  # noqa: ANN401
        kwargs: MutableMapping[str, Any],
    ) -> tuple[Any, MutableMapping[str, Any]]:
        kwargs["extra"] = {
            **dict(kwargs.get("extra") or {}),
            **(self.extra or {}),
            "stage": context_stage.get() or "-",
        }
        return msg, kwargs
