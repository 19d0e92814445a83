"""
Helpers for reading and restoring the plain (configuration-like) attributes of a module.
"""

import inspect
from types import ModuleType
from typing import Dict, Any


def get_module_attributes(mod: ModuleType) -> Dict[str, Any]:
    """Return the non-special attributes of a module with their current values.

    Dunder names, uppercase constants, modules, classes and functions are skipped, so for the `cfg` module
    the result is exactly the set of configuration values.

    Args:
        mod (module): The module to inspect.

    Returns:
        Mapping of attribute name to value.
    """

    return {name: value for name, value in mod.__dict__.items() if not _is_special(name, value)}


def set_module_attributes(mod: ModuleType, attributes: Dict[str, Any]) -> None:
    """Restore attributes previously captured by :func:`get_module_attributes`."""
    for name, value in attributes.items():
        if _is_special(name, value):
            raise ValueError(f"Attribute `{name}` is not a plain module attribute")
        setattr(mod, name, value)


def _is_special(name, value) -> bool:
    return (name.startswith("__")
            or name.isupper()
            or inspect.ismodule(value)
            or inspect.isclass(value)
            or inspect.isfunction(value))
