import sys

from cli.commands import cli, run

app = cli


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
