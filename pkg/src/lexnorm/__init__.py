"""Unsupervised lexical normalization with word embeddings."""

__version__ = "0.1.0"
