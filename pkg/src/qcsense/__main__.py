import sys

from qcsense.cli import main

sys.exit(main())
