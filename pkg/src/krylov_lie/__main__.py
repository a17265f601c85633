import sys

from krylov_lie.cli import main

sys.exit(main())
