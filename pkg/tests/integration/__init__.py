"""Integration tests for agnostic-dp."""
