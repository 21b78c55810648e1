"""
Command-line entry point for subagged cross-validation.

    python main.py bounds --variant vsym --n 100 --p 0.1 --eps 0.1
"""
import sys

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
