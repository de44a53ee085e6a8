import logging
import os
import tempfile
import unittest

from seqham.ham_solver import failure_report
from seqham.logging_config import (
    DEFAULT_LOG_FORMAT,
    WORKER_LOG_FORMAT,
    LogSettings,
    configure_logging,
    configure_worker_logging,
    worker_logging_settings,
)


class ConfigureLoggingTests(unittest.TestCase):
    def setUp(self) -> None:
        self.root_logger = logging.getLogger()
        self.original_handlers = list(self.root_logger.handlers)
        self.original_level = self.root_logger.level
        self.temp_log = tempfile.NamedTemporaryFile(delete=False)
        self.temp_log.close()

    def tearDown(self) -> None:
        for handler in list(self.root_logger.handlers):
            self.root_logger.removeHandler(handler)
            handler.close()
        for handler in self.original_handlers:
            self.root_logger.addHandler(handler)
        self.root_logger.setLevel(self.original_level)
        os.unlink(self.temp_log.name)

    def test_configure_logging_uses_environment(self) -> None:
        os.environ["SEQHAM_LOG_LEVEL"] = "DEBUG"
        os.environ["SEQHAM_LOG_FORMAT"] = "%(levelname)s:%(message)s"
        os.environ["SEQHAM_LOG_HANDLER"] = "file"
        os.environ["SEQHAM_LOG_FILE"] = self.temp_log.name

        configure_logging()

        self.assertEqual(self.root_logger.level, logging.DEBUG)
        self.assertTrue(self.root_logger.handlers)
        handler = self.root_logger.handlers[0]
        self.assertIsInstance(handler, logging.FileHandler)
        self.assertEqual(handler.formatter._fmt, "%(levelname)s:%(message)s")

        # Clean up environment overrides
        os.environ.pop("SEQHAM_LOG_LEVEL")
        os.environ.pop("SEQHAM_LOG_FORMAT")
        os.environ.pop("SEQHAM_LOG_HANDLER")
        os.environ.pop("SEQHAM_LOG_FILE")

    def test_arguments_win_over_environment(self) -> None:
        os.environ["SEQHAM_LOG_LEVEL"] = "DEBUG"
        try:
            configure_logging(level="warning", handler_type="console")
        finally:
            os.environ.pop("SEQHAM_LOG_LEVEL")

        self.assertEqual(self.root_logger.level, logging.WARNING)
        self.assertEqual(len(self.root_logger.handlers), 1)
        self.assertIsInstance(self.root_logger.handlers[0], logging.StreamHandler)

    def test_unknown_level_falls_back_to_info(self) -> None:
        configure_logging(level="chatty", handler_type="console")
        self.assertEqual(self.root_logger.level, logging.INFO)

    def test_unknown_handler_is_rejected(self) -> None:
        with self.assertRaises(ValueError):
            configure_logging(handler_type="syslog")

    def test_returned_settings_are_kept_for_workers(self) -> None:
        settings = configure_logging(level="error", handler_type="console")

        self.assertIsInstance(settings, LogSettings)
        self.assertEqual(settings.level, "ERROR")
        self.assertEqual(settings.handler_type, "console")
        self.assertIs(worker_logging_settings(), settings)


class WorkerLoggingTests(unittest.TestCase):
    def setUp(self) -> None:
        self.root_logger = logging.getLogger()
        self.original_handlers = list(self.root_logger.handlers)
        self.original_level = self.root_logger.level

    def tearDown(self) -> None:
        for handler in list(self.root_logger.handlers):
            self.root_logger.removeHandler(handler)
            handler.close()
        for handler in self.original_handlers:
            self.root_logger.addHandler(handler)
        self.root_logger.setLevel(self.original_level)

    def test_none_leaves_logging_untouched(self) -> None:
        before = list(self.root_logger.handlers)
        configure_worker_logging(None)
        self.assertEqual(self.root_logger.handlers, before)

    def test_default_format_gains_process_name(self) -> None:
        settings = LogSettings("DEBUG", DEFAULT_LOG_FORMAT, "console", "unused.log")
        configure_worker_logging(settings)

        self.assertEqual(self.root_logger.level, logging.DEBUG)
        self.assertEqual(len(self.root_logger.handlers), 1)
        self.assertEqual(self.root_logger.handlers[0].formatter._fmt, WORKER_LOG_FORMAT)

    def test_custom_format_is_kept(self) -> None:
        settings = LogSettings("INFO", "%(message)s", "console", "unused.log")
        configure_worker_logging(settings)
        self.assertEqual(self.root_logger.handlers[0].formatter._fmt, "%(message)s")


class FailureReportTests(unittest.TestCase):
    def test_failure_report_shapes_payload(self) -> None:
        payload = failure_report("Rotation budget exhausted", data={"phase": "budget"})
        self.assertIn("error", payload)
        self.assertEqual(payload["error"]["message"], "Rotation budget exhausted")
        self.assertEqual(payload["error"]["code"], "solver_failure")
        self.assertEqual(payload["error"]["data"], {"phase": "budget"})

    def test_failure_report_omits_empty_data(self) -> None:
        payload = failure_report("absent", code="absent")
        self.assertEqual(payload["error"]["code"], "absent")
        self.assertNotIn("data", payload["error"])


if __name__ == "__main__":
    unittest.main()
