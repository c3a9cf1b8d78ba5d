""" Naming and registry helpers."""

# License: BSD 3 clause

from .short_name_decorator import short_name, get_short_name, lookup
