"""
Launcher for the bundled enh executable.

Behavior:
- Runs the enhomology command-line front end with the process arguments.
- When run as a bundled EXE double-clicked without arguments, prints the
  help text and keeps the console open.
"""

from __future__ import annotations

import sys

from enhomology.cli import main


def is_frozen() -> bool:
    return getattr(sys, "frozen", False)


if __name__ == "__main__":
    if is_frozen() and len(sys.argv) == 1:
        try:
            main(["--help"])
        except SystemExit:
            pass
        input("Press Enter to close...")
        raise SystemExit(0)
    raise SystemExit(main())
