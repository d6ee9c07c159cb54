"""
Pytest configuration for all tests.
This file ensures the project root is in Python's path for all test modules
and pins the process settings the tests rely on.
"""
import os
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Serial by default; tests that compare worker counts pass threads explicitly
os.environ.setdefault("REGEN_STABLE_THREADS", "1")
os.environ.setdefault("REGEN_STABLE_LOG_LEVEL", "INFO")
