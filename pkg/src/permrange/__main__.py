import sys

from permrange.cli import main

sys.exit(main())
