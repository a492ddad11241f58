from ptrabi.cli import main
import sys

sys.exit(main())
