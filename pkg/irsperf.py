#!/usr/bin/env python3
"""
irsperf - Spectral and energy efficiency of IRS-assisted links with hardware impairments.

Run with: python irsperf.py <command> [options]
Or:       python -m src.cli <command> [options]
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
