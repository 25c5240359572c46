import sys

from ggdshrink.cli import main

sys.exit(main())
