"""Thin entry point; ``python main.py simulate ...`` behaves like ``python cli.py simulate ...``."""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
