"""Approximate Lie symmetries of perturbed evolution equations."""
