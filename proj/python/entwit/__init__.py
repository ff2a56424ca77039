"""Entropy minima of linear dimension witnesses (C++ core)."""

from ._entwit import *  # noqa: F401,F403
from ._entwit import __version__, run_cli

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]


def main(argv=None):
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
