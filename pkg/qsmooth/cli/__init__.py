"""
Command-line driver: run configuration, the ``train``, ``certify``,
``attack``, ``kernel`` and ``selftest`` commands, and their result files.
"""
from .config import ConfigError, RunConfig, load_config, config_hash
from .commands import cmd_train, cmd_certify, cmd_attack, cmd_kernel, cmd_selftest
from .selftest import run_selftest, SelftestReport
from .main import cli
