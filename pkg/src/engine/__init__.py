"""Exact finite-model engine for optimal stopping over predictable times."""
