"""Entry script: python cli.py {eval,sweep,verify} ..."""

import sys

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
