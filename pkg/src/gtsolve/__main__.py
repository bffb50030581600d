import sys

from gtsolve.cli import main

sys.exit(main())
