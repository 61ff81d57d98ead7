"""Exact tools for determinantal inequalities on totally nonnegative matrices."""
