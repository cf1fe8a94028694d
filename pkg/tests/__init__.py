# Tests for agnostic-dp
