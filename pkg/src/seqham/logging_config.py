"""Logging setup shared by the CLI and the sweep worker processes."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from seqham.constants import DEFAULT_LOG_FILE, DEFAULT_LOG_HANDLER, DEFAULT_LOG_LEVEL

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
# sweep workers log their process name so interleaved trials can be told apart
WORKER_LOG_FORMAT = "%(asctime)s - %(processName)s - %(name)s - %(levelname)s - %(message)s"
HANDLER_TYPES = ("console", "file")


@dataclass(frozen=True)
class LogSettings:
    """Fully resolved logging options; picklable so a process pool can reuse them."""

    level: str
    log_format: str
    handler_type: str
    log_file: str

    @classmethod
    def resolve(
        cls,
        level: str | None = None,
        log_format: str | None = None,
        handler_type: str | None = None,
    ) -> LogSettings:
        """Explicit arguments first, then ``SEQHAM_LOG_*``, then the package defaults."""
        return cls(
            level=(level or os.getenv("SEQHAM_LOG_LEVEL", DEFAULT_LOG_LEVEL)).upper(),
            log_format=log_format or os.getenv("SEQHAM_LOG_FORMAT", DEFAULT_LOG_FORMAT),
            handler_type=(handler_type or os.getenv("SEQHAM_LOG_HANDLER", DEFAULT_LOG_HANDLER)).lower(),
            log_file=os.getenv("SEQHAM_LOG_FILE", DEFAULT_LOG_FILE),
        )

    @property
    def numeric_level(self) -> int:
        value = logging.getLevelName(self.level)
        # getLevelName returns a string for unknown names
        return value if isinstance(value, int) else logging.INFO


_active: LogSettings | None = None


def _build_handler(settings: LogSettings, log_format: str) -> logging.Handler:
    if settings.handler_type == "console":
        handler: logging.Handler = logging.StreamHandler()
    elif settings.handler_type == "file":
        handler = logging.FileHandler(settings.log_file)
    else:
        raise ValueError(
            f"Unsupported handler type: {settings.handler_type}; expected one of {', '.join(HANDLER_TYPES)}"
        )
    handler.setLevel(settings.numeric_level)
    handler.setFormatter(logging.Formatter(log_format))
    return handler


def _install(settings: LogSettings, log_format: str) -> None:
    handler = _build_handler(settings, log_format)
    root = logging.getLogger()
    root.setLevel(settings.numeric_level)
    for old in list(root.handlers):
        root.removeHandler(old)
        old.close()
    root.addHandler(handler)
    # numpy/scipy RuntimeWarnings (e.g. log of zero in a bound) end up in the log
    logging.captureWarnings(True)


def configure_logging(
    *,
    level: str | None = None,
    log_format: str | None = None,
    handler_type: str | None = None,
) -> LogSettings:
    """Configure root logging; calling it again replaces the previous handler.

    Unspecified arguments come from the environment:

    - ``SEQHAM_LOG_LEVEL``: logging level (e.g. ``DEBUG``, ``INFO``)
    - ``SEQHAM_LOG_FORMAT``: logging format string
    - ``SEQHAM_LOG_HANDLER``: handler type (``console`` or ``file``)
    - ``SEQHAM_LOG_FILE``: file path when using the ``file`` handler

    Returns:
        The resolved settings, also kept for :func:`worker_logging_settings`

    Raises:
        ValueError: On an unknown handler type
    """
    global _active
    settings = LogSettings.resolve(level, log_format, handler_type)
    _install(settings, settings.log_format)
    _active = settings
    logging.getLogger(__name__).debug(
        "Logging configured: level=%s handler=%s", settings.level, settings.handler_type
    )
    return settings


def worker_logging_settings() -> LogSettings | None:
    """Settings the sweep pool should hand to its workers, or None if never configured."""
    return _active


def configure_worker_logging(settings: LogSettings | None) -> None:
    """Process-pool initializer: mirror the parent's logging in a sweep worker."""
    if settings is None:
        return
    fmt = settings.log_format if settings.log_format != DEFAULT_LOG_FORMAT else WORKER_LOG_FORMAT
    _install(settings, fmt)
