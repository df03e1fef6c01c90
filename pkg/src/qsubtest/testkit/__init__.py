"""Unit-test model: IO marks, partitions, coverage, executable cases and suites."""

from .cases import *  # noqa: F401,F403
from .cases import __all__ as _cases_all
from .iomark import IOMark, IOType, MarkedVar, classify_io_type, format_io_mark, parse_io_mark
from .partition import Coverage, Partition, combine
from .suitefile import *  # noqa: F401,F403
from .suitefile import __all__ as _suite_all

__all__ = sorted(
    set(_cases_all) | set(_suite_all) | {
        "IOMark", "IOType", "MarkedVar", "classify_io_type", "format_io_mark", "parse_io_mark",
        "Coverage", "Partition", "combine",
    }
)
