"""End-to-end tests for the quake CLI."""
