"""Persistence and HTTP access to built networks."""

from .app import create_app
from .bundle import (FORMAT_VERSION, NetworkBundle, export_bundle,
                     import_bundle, validate_bundle)
from .sessions import SessionStore

__all__ = ["FORMAT_VERSION", "NetworkBundle", "SessionStore", "create_app",
           "export_bundle", "import_bundle", "validate_bundle"]
