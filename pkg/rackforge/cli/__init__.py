"""Batch command line: verify, analyze, integrate, strip and rackcheck."""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
