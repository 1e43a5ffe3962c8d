"""Flow, trace, and suite persistence."""
