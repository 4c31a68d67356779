import logging

from rich.console import Console
from rich.logging import RichHandler

logger = logging.getLogger("psstspy")


def setup_logging(level: int = logging.WARNING) -> None:
    """
    Install a rich handler on stderr for the psstspy logger.

    Library code never calls this; the command line does.
    """
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False


def log_debug(msg: str, *args) -> None:
    logger.debug(msg, *args)


def log_info(msg: str, *args) -> None:
    logger.info(msg, *args)


def log_warning(msg: str, *args) -> None:
    logger.warning(msg, *args)
