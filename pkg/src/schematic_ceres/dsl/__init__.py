"""Concrete syntax for schema objects."""

from .parser import Discrepancy, Document, ParseError, parse, parse_file
from .printer import print_document
from .sexpr import Diagnostic, Span, read, write

__all__ = ["Diagnostic", "Discrepancy", "Document", "ParseError", "Span", "parse", "parse_file",
           "print_document", "read", "write"]
