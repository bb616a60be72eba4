"""
Custom exceptions for the DG-Morse toolkit
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base exception for toolkit errors"""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}


class SchemaError(ToolkitError):
    """Exception raised when an input document is malformed"""
    pass


class DegreeMismatchError(ToolkitError):
    """Exception raised when an entry does not respect the declared grading"""
    pass


class CompositionError(ToolkitError):
    """Exception raised when maps or morphisms cannot be composed"""
    pass


class InversionError(ToolkitError):
    """Exception raised when an arity-one component is not invertible"""
    pass


class ComplexError(ToolkitError):
    """Exception raised when a differential does not square to zero"""
    pass


class RetractError(ToolkitError):
    """Exception raised when a homotopy retract violates its identities"""
    pass


class FiberError(ToolkitError):
    """Exception raised when a map does not restrict to the fiber subcomplexes"""
    pass


class ArityBoundError(ToolkitError):
    """Exception raised when the arity truncation is too small for a construction"""
    pass


class QuasiIsomorphismError(ToolkitError):
    """Exception raised when an arity-one component fails to be a quasi-isomorphism"""
    pass


class GroupError(ToolkitError):
    """Exception raised when a multiplication table violates the group axioms"""
    pass


class ConfigurationError(ToolkitError):
    """Exception raised for configuration issues"""
    pass
