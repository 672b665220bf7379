import sys

from stochvote.cli import main

sys.exit(main())
