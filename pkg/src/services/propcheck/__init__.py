from src.services.propcheck.registry import PROPERTIES, PropertyDescriptor, registry
from src.services.propcheck.runner import (
    PropertyReport,
    PropertyResult,
    Status,
    run_suite,
)

__all__ = [
    "PROPERTIES",
    "PropertyDescriptor",
    "PropertyReport",
    "PropertyResult",
    "Status",
    "registry",
    "run_suite",
]
