"""Command-line interface for gesturebench."""
