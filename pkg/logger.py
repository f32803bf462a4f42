from loguru import logger
from config import env_vars
import sys

_FORMAT = "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <7}</level> | <cyan>{name}</cyan> - {message}"


def setup(level: str = None):
    """(Re)install the single stdout sink; reports go to files, never to this sink."""
    logger.remove()
    logger.add(sys.stdout, level=level or env_vars.get("LOG_LEVEL", "INFO"), format=_FORMAT)


setup()
