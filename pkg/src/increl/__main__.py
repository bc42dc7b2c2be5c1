import sys

from increl.cli import main

sys.exit(main())
