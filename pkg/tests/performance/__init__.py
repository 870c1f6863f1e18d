"""
Performance tests for x1jacobi.
"""
