#!/usr/bin/env python3
"""
wavecoex - Main Entry Point
"""

import sys
from pathlib import Path

# Make the repository root importable so `src` resolves as a package
sys.path.insert(0, str(Path(__file__).parent))

from src.app import main

if __name__ == "__main__":
    sys.exit(main())
