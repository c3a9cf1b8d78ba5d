""" Decorators for naming and registering ellie components."""

# License: BSD 3 clause

from ellie.errors import ConfigError


def short_name(expr, registry=None):
    """Attach a short name to a function or class, optionally recording it
    in a registry dictionary under that name.

    Parameters
    ----------
    expr: string
        Short name used in logs, configs and reports.
    registry: dict, default: None
        If given, the decorated object is stored as :code:`registry[expr]`.
    """
    def short_name_func_applicator(func):
        func.__short_name__ = expr
        if registry is not None:
            if expr in registry:
                raise ConfigError(f"""'{expr}' is already registered.""")
            registry[expr] = func
        return func
    return short_name_func_applicator


def get_short_name(v):
    return v if not hasattr(v, '__short_name__') else v.__short_name__


def lookup(registry, name, what):
    """Fetch :code:`registry[name]`, raising a ConfigError listing the valid
    names otherwise."""
    try:
        return registry[name]
    except KeyError:
        valid = ', '.join(sorted(registry))
        raise ConfigError(f"""Unknown {what} '{name}'. Must be one of: {valid}.""") from None
