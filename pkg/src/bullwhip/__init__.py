"""Three-echelon supply-chain simulator with knowledge-base driven agents."""

__version__ = "0.1.0"
