import sys

from framekit.cli import main

sys.exit(main())
