import sys

from fairmatroid.cli import main

sys.exit(main())
