"""Test suite for the zmod toolkit."""
