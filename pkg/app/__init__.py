"""Subagging with cross-validated risk estimation."""
