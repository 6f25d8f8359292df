import sys

from latkit.cli import main

sys.exit(main())
