"""Split Bregman reconstruction with TGV and multilevel sparsity."""

__version__ = "0.1.0"
