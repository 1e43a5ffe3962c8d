"""Integration tests across core and adapters."""
