"""
gslab run pipeline
Config schema, command runner and report writers
"""

from .config import Command, OutputFormat, ProfileSpec, RunConfig
from .runner import RunOutcome, run

__all__ = [
    'Command',
    'OutputFormat',
    'ProfileSpec',
    'RunConfig',
    'RunOutcome',
    'run',
]
