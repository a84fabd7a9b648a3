from polyfix.cli import main
import sys

sys.exit(main())
