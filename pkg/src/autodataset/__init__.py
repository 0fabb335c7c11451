"""autodataset: paper-first arXiv dataset discovery and retrieval."""

__version__ = "0.1.0"
