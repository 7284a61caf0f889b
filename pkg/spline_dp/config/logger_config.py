import logging
from logging.handlers import RotatingFileHandler

from rich.logging import RichHandler

from spline_dp.config.setting import get_settings

settings = get_settings()
# Configure logger
logger = logging.getLogger(settings.LOGGER_NAME)
logger.setLevel(settings.LOG_LEVEL)

# Create a file handler for logging
file_handler = RotatingFileHandler(
    settings.LOG_FILE or f"{settings.LOGGER_NAME}.log",
    maxBytes=settings.LOG_MAX_BYTES,
    backupCount=settings.LOG_BACKUP_COUNT,
    delay=True,
)
file_handler.setLevel(settings.LOG_LEVEL)

# Create a formatter and set it for the file handler
formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
file_handler.setFormatter(formatter)

# Add the file handler to the logger
logger.addHandler(file_handler)


def enable_console_logging(level: str | int = logging.INFO) -> None:
    """Mirror the log stream to the terminal; used by the CLI only."""
    if any(isinstance(h, RichHandler) for h in logger.handlers):
        return
    console_handler = RichHandler(show_path=False, markup=False)
    console_handler.setLevel(level)
    logger.addHandler(console_handler)
