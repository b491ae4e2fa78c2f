"""
Logging configuration for flowstruct
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logging(level: str = "INFO", log_dir: Optional[str] = "logs"):
    """Configure logging with a rotating file and console (stderr) output"""
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers = []

    if log_dir:
        try:
            os.makedirs(log_dir, exist_ok=True)
            # 10MB max, keep 5 files
            file_handler = RotatingFileHandler(
                os.path.join(log_dir, 'flowstruct.log'),
                maxBytes=10*1024*1024,
                backupCount=5,
                encoding='utf-8'
            )
            file_handler.setFormatter(formatter)
            handlers.append(file_handler)
        except OSError as e:
            print(f"Log directory {log_dir} unavailable, logging to console only: {e}", file=sys.stderr)

    # stdout carries rendered reports, so the console handler writes to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        handlers=handlers,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT
    )

    return logging.getLogger(__name__)


def get_logger(name):
    """Get a logger instance"""
    return logging.getLogger(name)
