import sys

from phasebound.cli_io import main

sys.exit(main())
