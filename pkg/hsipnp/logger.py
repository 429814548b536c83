import sys

from loguru import logger

# Silent as a library; the CLI opts in through configure().
logger.disable('hsipnp')

LOG_FORMAT = '{time:HH:mm:ss.SSS} | {level: <7} | {name}:{line} - {message}'


def configure(level: str = 'WARNING') -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    logger.enable('hsipnp')


__all__ = ['configure', 'logger']
