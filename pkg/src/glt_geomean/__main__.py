"""
Allow running the package as a module.

This module enables running the package with:
    python -m glt_geomean

It simply delegates to the main() function from glt_geomean.py.
"""

from .glt_geomean import main

if __name__ == "__main__":
    exit(main())
