"""Quantum data-embedding benchmark toolkit.

Subpackages:
  qsim      statevector simulator (gates, apply, readout)
  encoding  classical-to-quantum encoders and classical readout
  pipeline  CSV ingestion, feature pruning, PCA, splitting
  models    from-scratch classifiers
  metrics   binary-classification metrics
  bench     experiment matrix runner and CLI
"""

__version__ = "0.1.0"
