from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from typing import Literal, TextIO

from serde import deserialize
from serde.yaml import from_yaml

from quasicut.core.errors import QuasicutConfigurationError


@deserialize
@dataclass(kw_only=True, eq=True, frozen=True)
class LoggingHandlerConfig:
    formatter: str | None = None
    formatter_with_stage: str | None = None
    log_level: Literal["critical", "error", "warning", "info", "debug", "trace"] | None = None

    def get_numeric_log_level(self) -> int | None:  # noqa: PLR0911
        if self.log_level == "critical":
            return logging.CRITICAL

        if self.log_level == "error":
            return logging.ERROR

        if self.log_level == "warning":
            return logging.WARNING

        if self.log_level == "info":
            return logging.INFO

        if self.log_level == "debug":
            return logging.DEBUG

        if self.log_level == "trace":
            return logging.TRACE  # type: ignore

        return None


@deserialize
@dataclass(kw_only=True, eq=True, frozen=True)  # type: ignore
class StreamLoggingHandler(LoggingHandlerConfig):
    stream: Literal["stdout", "stderr"] = "stderr"

    def get_actual_output_stream(self) -> TextIO | None:
        if self.stream == "stdout":
            return sys.stdout

        if self.stream == "stderr":
            return sys.stderr

        return None


@deserialize
@dataclass(kw_only=True, eq=True, frozen=True)  # type: ignore
class FileLoggingHandler(LoggingHandlerConfig):
    filename: str  # type: ignore


@deserialize
@dataclass(kw_only=True, eq=True, frozen=True)  # type: ignore
class LoggingConfig(LoggingHandlerConfig):
    handlers: set[StreamLoggingHandler | FileLoggingHandler] = field(default_factory=set)

    def __add__(self, b: LoggingConfig) -> LoggingConfig:
        return LoggingConfig(
            handlers=self.handlers | b.handlers,
            formatter=b.formatter if b.formatter is not None else self.formatter,
            formatter_with_stage=b.formatter_with_stage
            if b.formatter_with_stage is not None
            else self.formatter_with_stage,
            log_level=b.log_level if b.log_level is not None else self.log_level,
        )


@deserialize(kw_only=True, frozen=True)
class ToolkitConfig:
    workers: int = 1
    exhaustive_subset_limit: int = 2**20
    exhaustive_cut_limit: int = 10**7
    enumeration_budget: int = 10**7
    factor_node_budget: int = 2_000_000
    certify_full_rank_modularly: bool = True
    density_floor_c: float | None = None

    logs: dict[str, LoggingConfig] = field(default_factory=dict)

    def density_floor(self, p: float) -> float:
        """Lower bound reported against min d_ij; defaults to p^3/10."""
        if self.density_floor_c is not None:
            return self.density_floor_c

        return p**3 / 10


def parse_toolkit_config(config: str, source: str) -> ToolkitConfig:
    from quasicut.core.logging import get_logger

    get_logger(__name__).info(
        "Loading toolkit configuration from: {source}",
        source=source,
    )

    try:
        toolkit_config = from_yaml(ToolkitConfig, config)
    except Exception as e:
        raise QuasicutConfigurationError(f"Configuration in {source} is not valid: {e}") from e

    if not isinstance(toolkit_config, ToolkitConfig):
        raise QuasicutConfigurationError(f"Configuration in {source} is not valid")

    if toolkit_config.workers < 1:
        raise QuasicutConfigurationError("workers must be at least 1")

    return toolkit_config


_toolkit_config: ToolkitConfig | None = None
_default_toolkit_config = ToolkitConfig()


def set_toolkit_config(config: ToolkitConfig) -> None:
    global _toolkit_config
    from quasicut.core.logging import get_logger, refresh_loggers

    if _toolkit_config is not None:
        e = QuasicutConfigurationError(
            "Toolkit config is already set. It cannot be set to a new value",
        )
        get_logger(__name__).exception(e)
        raise e

    _toolkit_config = config
    refresh_loggers()


def reset_toolkit_config() -> None:
    global _toolkit_config
    _toolkit_config = None

    from quasicut.core.logging import refresh_loggers

    refresh_loggers()


def get_toolkit_config() -> ToolkitConfig:
    if _toolkit_config is None:
        return _default_toolkit_config

    return _toolkit_config
