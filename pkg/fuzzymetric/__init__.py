"""Endograph metrics, Gamma-convergence checks and compactness audits for fuzzy sets."""
