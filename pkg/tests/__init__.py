"""Tests for Hydrolog library."""
