"""
tests/conftest.py
Puts the repository root on sys.path so the flat modules import directly.
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
