"""Integration tests for Hydrolog."""
