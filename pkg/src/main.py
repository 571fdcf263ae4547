"""
gesturebench - landmark LSTM vs 3D CNN gesture recognition.

Main entry point for the application.
"""

from src.config.settings import load_env
from src.core.logging import configure_logging

# Configure logging and .env before the CLI reads options and env vars
configure_logging()
load_env()

from src.cli.commands import app  # noqa: E402


def main() -> None:
    app()


if __name__ == "__main__":
    main()
