"""Unit tests for Hydrolog modules."""
