"""Tests package for dilution-gt."""
