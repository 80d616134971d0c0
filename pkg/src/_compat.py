"""Backports of Python 3.11 stdlib names used by the package."""

import logging
import sys

if sys.version_info >= (3, 11):
    import tomllib
    from enum import StrEnum

    get_level_names_mapping = logging.getLevelNamesMapping
else:
    from enum import Enum

    import tomli as tomllib

    class StrEnum(str, Enum):
        """Equivalent of Python 3.11 ``enum.StrEnum``."""

        def __new__(cls, *values):
            value = str(*values)
            member = str.__new__(cls, value)
            member._value_ = value
            return member

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()

    def get_level_names_mapping():
        """Equivalent of Python 3.11 ``logging.getLevelNamesMapping``."""
        return logging._nameToLevel.copy()

__all__ = ["StrEnum", "get_level_names_mapping", "tomllib"]
