import sys

from phaselearn.harness.cli import main

sys.exit(main())
