import sys

from zigzag.cli import main

sys.exit(main())
