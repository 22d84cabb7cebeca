"""Legislation network extraction and analysis."""
