"""Tests for levelset-recon."""
