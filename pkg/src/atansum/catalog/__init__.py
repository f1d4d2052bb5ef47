"""The identity catalog: records, parameterized families and verification."""

from .families import (
    FAMILIES,
    Binding,
    ConstraintViolation,
    UnknownFamily,
    family_instantiate,
    load_bindings,
)
from .records import (
    CatalogError,
    IdentityRecord,
    ParseError,
    PrintedArg,
    SchemaError,
    bundled_catalog_path,
    default_catalog_path,
    find_record,
    load_catalog,
)
from .verify import VerificationReport, summarize, verify_all, verify_binding, verify_bindings, verify_identity

__all__ = [
    "FAMILIES", "Binding", "CatalogError", "ConstraintViolation", "IdentityRecord", "ParseError",
    "PrintedArg", "SchemaError", "UnknownFamily", "VerificationReport", "bundled_catalog_path",
    "default_catalog_path", "family_instantiate", "find_record", "load_bindings", "load_catalog",
    "summarize", "verify_all", "verify_binding", "verify_bindings", "verify_identity",
]
