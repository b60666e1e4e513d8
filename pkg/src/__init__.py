"""One-trial causal-model simulator and exact CHSH analysis toolkit."""

__version__ = "0.1.0"
