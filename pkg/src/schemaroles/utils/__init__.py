# this_file: schemaroles/utils/__init__.py
"""Utility functions for schemaroles."""
