"""Exact finite-scale minimax, domination and representation theorems for finitely additive measures."""
