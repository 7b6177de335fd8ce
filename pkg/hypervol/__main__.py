"""Run the command-line harness with ``python -m hypervol``."""
import sys

import hypervol.cli

if __name__ == "__main__":
    sys.exit(hypervol.cli.main())
