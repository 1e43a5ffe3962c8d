"""Adapters for external integrations."""
