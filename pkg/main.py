#!/usr/bin/env python3
"""
Two-way interference channel lab
Main entry point for the command-line interface
"""

import sys

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from src.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
