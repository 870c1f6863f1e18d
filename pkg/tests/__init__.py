"""
Test suite for x1jacobi.
"""
