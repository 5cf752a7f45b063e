"""Allow running as `python -m chabauty`."""
from chabauty.main import run

run()
