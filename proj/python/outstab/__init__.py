"""Config-driven runner and numeric probes for output-stability experiments."""

import json as _json

try:
    from outstab import _core
except ImportError:  # build-tree layout keeps the extension next to the package
    import _core

__version__ = _core.__version__

theta_threshold_ugaos = _core.theta_threshold_ugaos
theta_threshold_ios = _core.theta_threshold_ios


def catalog():
    """Built-in systems with dimensions and parameter descriptions."""
    return _json.loads(_core.catalog_json())


def validate_config(subcommand, config):
    """Raises ValueError with the offending key path when the config is invalid."""
    _core.validate_config_json(subcommand, _json.dumps(config))


def run(subcommand, config, out_dir, seed=None, format=None, jobs=None):
    """Executes one pipeline; returns {exit_code, artifacts, manifest}."""
    out = _core.run_json(subcommand, _json.dumps(config), str(out_dir), seed, format, jobs)
    return _json.loads(out)


def quc_check(times, values, eps_list, delta_grid):
    return _json.loads(
        _core.quc_check(list(times), list(values), list(eps_list), list(delta_grid))
    )


def barbalat(times, values, rho="identity", tail_fraction=0.2):
    return _json.loads(_core.barbalat(list(times), list(values), rho, tail_fraction))
