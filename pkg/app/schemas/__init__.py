"""Validated run-configuration schemas."""
