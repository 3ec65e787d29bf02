import sys

from factortime.cli import main

sys.exit(main())
