"""Spectral analysis of a doubly infinite Jacobi operator with q-hypergeometric
eigenfunctions, its orthogonality measures and the related q-series identities."""
__version__ = "0.1.0"
