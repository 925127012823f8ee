import sys

from .cli import main

argv = sys.argv[1:]
if argv[:1] == ["simulate"]:
    argv = argv[1:]
sys.exit(main(argv))
