"""CLI package for quake."""
