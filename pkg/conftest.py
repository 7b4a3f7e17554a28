import logging

import pytest


@pytest.fixture
def restore_logging():
    """Put back the root handlers that the CLI replaces"""
    root = logging.getLogger()
    handlers = list(root.handlers)
    level = root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
