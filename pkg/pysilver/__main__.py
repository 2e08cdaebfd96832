import sys

from pysilver.cli import main

sys.exit(main())
