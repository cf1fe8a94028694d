"""Unit tests for agnostic-dp."""
