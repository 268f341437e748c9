"""
``qsmooth`` command line.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure,
3 failed selftest.
"""
import logging
import os
import sys
import traceback

import click

from .commands import cmd_attack, cmd_certify, cmd_kernel, cmd_selftest, cmd_train
from .config import ConfigError, load_config

__all__ = ['cli', 'main', 'setup_logging']

log = logging.getLogger('qsmooth')

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_SELFTEST = 0, 1, 2, 3


def setup_logging(verbose=False):
    """Timestamped progress lines on stderr for the ``qsmooth`` logger."""
    if not any(getattr(h, '_qsmooth', False) for h in log.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('%(asctime)s  %(message)s', datefmt='%H:%M:%S'))
        handler._qsmooth = True
        log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.INFO)


def _load(config, seed):
    cfg = load_config(config)
    if seed is not None:
        cfg.experiment.seed = seed
    return cfg


config_option = click.option('--config', 'config', required=True,
                             type=click.Path(dir_okay=False), help='run configuration (JSON)')
checkpoint_option = click.option('--checkpoint', 'checkpoint', default=None,
                                 type=click.Path(dir_okay=False),
                                 help='checkpoint file, default OUT/checkpoint.json')
out_option = click.option('--out', 'out', default=None, type=click.Path(file_okay=False),
                          help='output directory, default output.dir of the config')
threads_option = click.option('--threads', 'threads', default=1, type=click.IntRange(min=1),
                              envvar='QSMOOTH_THREADS', show_default=True,
                              help='worker threads (env QSMOOTH_THREADS)')
seed_option = click.option('--seed', 'seed', default=None, type=int,
                           help='overrides experiment.seed')


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='debug logging')
def cli(verbose):
    """Randomized smoothing of quantum classifiers: train, certify, attack."""
    setup_logging(verbose)


@cli.command()
@config_option
@out_option
@threads_option
@seed_option
def train(config, out, threads, seed):
    """Train the configured model and write a checkpoint."""
    cfg = _load(config, seed)
    cmd_train(cfg, out or cfg.output.dir, threads)
    return EXIT_OK


def _checkpoint(checkpoint, out):
    return checkpoint or os.path.join(out, 'checkpoint.json')


@cli.command()
@config_option
@checkpoint_option
@out_option
@threads_option
@seed_option
def certify(config, checkpoint, out, threads, seed):
    """Certify the test split and write certificates and curves."""
    cfg = _load(config, seed)
    out = out or cfg.output.dir
    cmd_certify(cfg, _checkpoint(checkpoint, out), out, threads)
    return EXIT_OK


@cli.command()
@config_option
@checkpoint_option
@out_option
@threads_option
@seed_option
def attack(config, checkpoint, out, threads, seed):
    """Attack the test split with PGD over the epsilon grid."""
    cfg = _load(config, seed)
    out = out or cfg.output.dir
    cmd_attack(cfg, _checkpoint(checkpoint, out), out, threads)
    return EXIT_OK


@cli.command()
@config_option
@out_option
@threads_option
@seed_option
def kernel(config, out, threads, seed):
    """Export kernel values on a grid, without and with smoothing."""
    cfg = _load(config, seed)
    cmd_kernel(cfg, out or cfg.output.dir, threads)
    return EXIT_OK


@cli.command()
@out_option
@seed_option
def selftest(out, seed):
    """Run the built-in consistency checks and print a JSON report."""
    report = cmd_selftest(out, 0 if seed is None else seed)
    click.echo(report.model_dump_json(indent=1))
    return EXIT_OK if report.passed else EXIT_SELFTEST


def main(argv=None):
    """Console entry point; returns the process exit code."""
    try:
        rv = cli.main(args=argv, prog_name='qsmooth', standalone_mode=False)
    except (ConfigError, FileNotFoundError) as err:
        log.error('error: %s', err)
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as err:
        err.show()
        return EXIT_USAGE
    except Exception as err:
        log.error('%s: %s', type(err).__name__, err)
        log.debug(traceback.format_exc())
        return EXIT_RUNTIME
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
