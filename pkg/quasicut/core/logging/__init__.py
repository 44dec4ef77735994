import datetime
import logging
from collections.abc import MutableMapping
from inspect import getfullargspec
from logging.handlers import RotatingFileHandler
from pathlib import Path

import coloredlogs

from quasicut.core.configuration import (
    FileLoggingHandler,
    LoggingConfig,
    StreamLoggingHandler,
    get_toolkit_config,
)
from quasicut.core.errors import QuasicutConfigurationError
from quasicut.core.logging.logger_adapter_with_trace import TRACE_LEVEL, LoggerAdapterWithTrace, StageLoggerAdapter


def __add_trace_logging_level(level_num: int) -> None:
    if hasattr(logging, "trace"):
        return

    def _log_for_level(self, *args, **kwargs) -> None:  # noqa: ANN001, ANN002, ANN003
        try:
            self.log(level_num, *args, **kwargs)
        except Exception as e:
            print(e, args, kwargs)

    def _log_to_root(*args, **kwargs) -> None:  # noqa: ANN002, ANN003
        try:
            logging.log(level_num, *args, **kwargs)
        except Exception as e:
            print(e, args, kwargs)

    logging.addLevelName(level_num, "TRACE")
    setattr(logging, "TRACE", level_num)  # noqa: B010
    setattr(logging.getLoggerClass(), "trace", _log_for_level)  # noqa: B010
    setattr(logging, "trace", _log_to_root)  # noqa: B010


__add_trace_logging_level(TRACE_LEVEL)


class BraceMessage:
    def __init__(self, fmt: str, args: tuple[object, ...], kwargs: dict[str, object]) -> None:
        self.fmt = fmt
        self.args = args
        self.kwargs = kwargs

    def __str__(self) -> str:
        try:
            return self.fmt.format(*self.args, **self.kwargs)

        except BaseException:
            return str(self.fmt)

    def __repr__(self) -> str:
        return self.__str__()


class StyleAdapter(LoggerAdapterWithTrace):
    def __init__(self, logger: logging.Logger | logging.LoggerAdapter) -> None:
        super().__init__(logger, {}, merge_extra=True)

    def log(self, level: int, msg: object, *args: object, **kwargs: object) -> None:
        if not self.isEnabledFor(level):
            return

        msg, log_kwargs = self.process(str(msg), kwargs)
        self.logger._log(level, BraceMessage(msg, args, kwargs), (), **log_kwargs)  # noqa: SLF001

    def process(self, msg: str, kwargs: MutableMapping[str, object]) -> tuple[str, dict[str, object]]:
        log_kwargs = getfullargspec(self.logger._log).args[1:]  # noqa: SLF001
        main_args = {key: kwargs[key] for key in log_kwargs if key in kwargs}

        extra = dict(main_args.get("extra", {}))  # type: ignore
        ad = {"_additionalArgs": {key: kwargs[key] for key in kwargs if key not in log_kwargs} | extra}

        main_args["extra"] = {**extra, **ad}

        return (
            msg,
            main_args,
        )


_log_config: dict[str, LoggerAdapterWithTrace[logging.Logger]] = {}
_default_config = LoggingConfig(
    log_level="info",
    handlers={StreamLoggingHandler()},  # type: ignore
)


def __get_log_config(name: str) -> LoggingConfig:
    config = get_toolkit_config()

    base_config = config.logs.get("_base", _default_config)
    final_config = config.logs.get("_default", LoggingConfig())

    if name in config.logs:
        final_config = final_config + config.logs[name]

    return base_config + final_config


class _IsoFormatter(logging.Formatter):
    def formatTime(self, record: logging.LogRecord, datefmt: str | None = None) -> str:  # noqa: N802
        dt = datetime.datetime.fromtimestamp(record.created).astimezone()
        if datefmt:
            return dt.strftime(datefmt)

        return dt.isoformat(timespec="milliseconds")


class _ColoredIsoFormatter(coloredlogs.ColoredFormatter):
    def formatTime(self, record: logging.LogRecord, datefmt: str | None = None) -> str:  # noqa: N802
        dt = datetime.datetime.fromtimestamp(record.created).astimezone()
        if datefmt:
            return dt.strftime(datefmt)

        return dt.isoformat(timespec="milliseconds")


def __configure_logger(
    logger: logging.Logger,
    *,
    config: LoggingConfig,
    logger_name: str,
    include_stage: bool,
) -> None:
    for existing in list(logger.handlers):
        logger.removeHandler(existing)
        existing.close()

    config_log_level = config.get_numeric_log_level()
    min_log_level = min([x.get_numeric_log_level() or logging.INFO for x in config.handlers] or [logging.INFO])

    logger.setLevel(config_log_level or min_log_level)
    logger.propagate = False

    config_formatter = config.formatter
    if config_formatter is None:
        config_formatter = "[%(asctime)s][%(levelname)s][%(name)s]  %(message)s"

    config_formatter_with_stage = config.formatter_with_stage
    if config_formatter_with_stage is None:
        config_formatter_with_stage = "[%(asctime)s][%(levelname)s][%(name)s][%(stage)s]  %(message)s"

    for handler_config in config.handlers:
        if include_stage:
            formatter = handler_config.formatter_with_stage or config_formatter_with_stage
        else:
            formatter = handler_config.formatter or config_formatter

        handler: logging.Handler
        if isinstance(handler_config, FileLoggingHandler):
            output_filename = handler_config.filename.replace("{logger_name}", logger_name)

            Path(output_filename).parent.mkdir(parents=True, exist_ok=True)
            handler = RotatingFileHandler(
                output_filename,
                backupCount=5,
                maxBytes=5_000_000,
            )
            handler.setFormatter(_IsoFormatter(formatter))

        elif isinstance(handler_config, StreamLoggingHandler):
            handler = logging.StreamHandler(handler_config.get_actual_output_stream())
            handler.setFormatter(_ColoredIsoFormatter(formatter))
        else:
            raise QuasicutConfigurationError("Unsupported LoggerConfig Handler")

        handler.setLevel(handler_config.get_numeric_log_level() or config_log_level or logging.INFO)
        logger.addHandler(handler)


def __build_logger(logger_name: str, *, include_stage: bool) -> LoggerAdapterWithTrace[logging.Logger]:
    logger = logging.getLogger(logger_name)
    __configure_logger(
        logger,
        config=__get_log_config(logger_name),
        logger_name=logger_name,
        include_stage=include_stage,
    )
    return StyleAdapter(logger)


def get_logger(logger_name: str) -> LoggerAdapterWithTrace[logging.Logger]:
    if logger_name not in _log_config:
        _log_config[logger_name] = __build_logger(logger_name, include_stage=False)

    return _log_config[logger_name]


def get_stage_logger(logger_name: str) -> LoggerAdapterWithTrace[logging.Logger | LoggerAdapterWithTrace]:
    """Return a logger that tags each record with the pipeline stage currently running."""
    key = f"{logger_name}#stage"
    if key not in _log_config:
        _log_config[key] = __build_logger(f"{logger_name}.stage", include_stage=True)

    return StageLoggerAdapter(_log_config[key], {})


def refresh_loggers() -> None:
    """Re-apply handler configuration to every logger handed out so far."""
    for key in list(_log_config):
        include_stage = key.endswith("#stage")
        logger_name = f"{key.removesuffix('#stage')}.stage" if include_stage else key
        __configure_logger(
            logging.getLogger(logger_name),
            config=__get_log_config(logger_name),
            logger_name=logger_name,
            include_stage=include_stage,
        )
