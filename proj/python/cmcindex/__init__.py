"""Morse index of CMC hypersurfaces in the unit sphere."""

import json

from ._cmcindex import *  # noqa: F401,F403
from ._cmcindex import __version__, run_cli


def cli_json(*args):
    """Run a CLI subcommand and return (exit_code, parsed JSON report or None)."""
    code, out, _ = run_cli([str(a) for a in args])
    return code, (json.loads(out) if out.strip().startswith("{") else None)
