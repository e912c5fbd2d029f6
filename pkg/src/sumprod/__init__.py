"""Exact set arithmetic for sum-product expanders."""
