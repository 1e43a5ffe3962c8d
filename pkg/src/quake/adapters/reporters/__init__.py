"""Renderers for kill matrices, mutation summaries, and EP profiles."""
