"""Computable cleavage operads on S^1 and S^2."""
