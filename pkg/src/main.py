"""
Entry script: `python src/main.py verify --preset pair:2` runs the same
command line as the installed `wmha` script.
"""

import sys

from wmha.cli import main

if __name__ == "__main__":
    sys.exit(main())
