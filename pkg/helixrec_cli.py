#!/usr/bin/env python3
"""Entry point: ``python helixrec_cli.py reconstruct --kappa 1 --tau 0 --s0 0 --s1 6.283185307179586``."""
import sys

from helixrec.cli import main

if __name__ == '__main__':
    sys.exit(main())
