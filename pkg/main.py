"""
Main entry point for the NegBio command-line tool.
"""
import sys

from dotenv import load_dotenv

# Load environment variables (LOG_LEVEL, LOG_FILE)
load_dotenv()

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
