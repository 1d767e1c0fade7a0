import sys

from shockstab.cli import main

sys.exit(main())
