"""Main entry point for the framepath command line."""

import logging

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from services import settings  # noqa: E402
from commands import cli  # noqa: E402

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level(), logging.INFO),
    format="%(asctime)s - %(levelname)s - %(message)s",
)

if __name__ == "__main__":
    cli()
