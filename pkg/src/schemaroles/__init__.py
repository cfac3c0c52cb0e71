# this_file: schemaroles/__init__.py
"""schemaroles: map relational database schemas to PropBank rolesets."""

__version__ = "0.1.0"
__author__ = "Adam"

from loguru import logger

# Configure default logger
logger.disable("schemaroles")  # Disabled by default, applications enable it via configure_logging
