"""Thermal Casimir force gradient for graphene-coated and bare plates."""

__version__ = "0.1.0"
