from contextlib import AbstractContextManager
import logging
import logging.config
import logging.handlers
import os
import queue
from typing import List, NamedTuple, Optional, Sequence

import yaml


LOGGER = logging.getLogger(__name__)


DEFAULT_LOGGING_CONFIG_PATH = 'config/logging.yaml'


class LoggingEnvironmentVariables:
    LOGGING_CONFIG = 'TRA_SOLVER_LOGGING_CONFIG'


def get_logging_config_path() -> str:
    return os.getenv(LoggingEnvironmentVariables.LOGGING_CONFIG) or DEFAULT_LOGGING_CONFIG_PATH


def configure_logging(config_path: Optional[str] = None) -> None:
    config_path = config_path or get_logging_config_path()
    if not os.path.exists(config_path):
        logging.basicConfig(level='INFO')
        LOGGER.info('Logging config not found, using defaults: %r', config_path)
        return
    with open(config_path, 'r', encoding='utf-8') as config_fp:
        logging.config.dictConfig(yaml.load(config_fp, yaml.SafeLoader))
    LOGGER.debug('Configured logging from: %r', config_path)


def get_all_loggers_with_handlers() -> Sequence[logging.Logger]:
    root_logger = logging.root
    logging_manager: logging.Manager = root_logger.manager
    return (
        [root_logger]
        + [
            logging.getLogger(logger_name)
            for logger_name in logging_manager.loggerDict  # pylint: disable=no-member
            if logging.getLogger(logger_name).handlers
        ]
    )


class _QueuedHandler(NamedTuple):
    queue_handler: logging.handlers.QueueHandler
    queue_listener: logging.handlers.QueueListener


class ThreadedLogging(AbstractContextManager):
    """
    Routes records of the given loggers through queues while worker pools run, so that
    sweep and verification threads never write to the console handlers directly.
    """
    def __init__(self, loggers: Optional[Sequence[logging.Logger]] = None):
        self.loggers = loggers if loggers is not None else get_all_loggers_with_handlers()
        self.original_handlers_list = [logger.handlers for logger in self.loggers]
        self.queued_by_handler_id: dict[int, _QueuedHandler] = {}

    def _get_queue_handler(self, handler: logging.Handler) -> logging.handlers.QueueHandler:
        queued = self.queued_by_handler_id.get(id(handler))
        if queued is None:
            logging_queue: queue.Queue[logging.LogRecord] = queue.Queue()
            queued = _QueuedHandler(
                queue_handler=logging.handlers.QueueHandler(logging_queue),
                queue_listener=logging.handlers.QueueListener(logging_queue, handler)
            )
            self.queued_by_handler_id[id(handler)] = queued
        return queued.queue_handler

    def _patch_logger_handlers(self, logger: logging.Logger):
        handlers: List[logging.Handler] = [
            handler
            for handler in logger.handlers
            if not isinstance(handler, (logging.handlers.QueueHandler, logging.NullHandler))
        ]
        if handlers:
            logger.handlers = [self._get_queue_handler(handler) for handler in handlers]

    def __enter__(self) -> 'ThreadedLogging':
        for logger in self.loggers:
            self._patch_logger_handlers(logger)
        for queued in self.queued_by_handler_id.values():
            queued.queue_listener.start()
        return self

    def __exit__(self, *exc_details):
        for logger, original_handlers in zip(self.loggers, self.original_handlers_list):
            logger.handlers = original_handlers
        for queued in self.queued_by_handler_id.values():
            queued.queue_listener.stop()
