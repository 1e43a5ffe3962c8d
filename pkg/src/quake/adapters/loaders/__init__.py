"""Readers for schema, config, policy, and mutant plan files."""
