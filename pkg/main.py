# main.py
import sys

from src.cli import dispatch


if __name__ == "__main__":
    sys.exit(dispatch())
