import sys

from graphlin.cli import main

sys.exit(main())
