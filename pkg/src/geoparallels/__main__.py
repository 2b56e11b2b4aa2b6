import sys

from .cli_reports.cli import main

sys.exit(main())
