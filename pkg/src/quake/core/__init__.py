"""Core domain logic for quake."""
