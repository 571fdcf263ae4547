"""Tests for OpenClaw Mine."""
