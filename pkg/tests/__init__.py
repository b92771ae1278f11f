"""Tests for cs-color-code package."""
