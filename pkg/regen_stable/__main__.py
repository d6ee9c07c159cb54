import sys

from regen_stable.main import main

sys.exit(main())
