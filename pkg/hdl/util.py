"""
Utility functions
-----------------
    get_config - Pull out configuration information.
    rel_to_abs - Convert relative paths to rooted at project ones.
    init_logging - Project wide logging initialization.
    parse_run_file - Read a flat key=value run file.
    thread_cap - Number of workers sweeps may use.
"""
import logging
import logging.handlers
import logging.config
import os
import re
import sys

import yaml
try:
    from yaml import CSafeLoader as Loader
except ImportError:
    from yaml import SafeLoader as Loader

import hdl.exc

THREADS_ENV = 'HDL_THREADS'
# YAML 1.1 wants a dot in floats, run files also accept exponent only forms like 1e-3.
EXP_FLOAT = re.compile(r"^[-+]?[0-9][0-9_]*(\.[0-9_]*)?[eE][-+]?[0-9]+$")
LOG_MSG = """See main.log for general traces.
Rolling over existing file logs as listed below.
    module_name -> output_file
    =========================="""


class RunFileLoader(Loader):
    """
    Safe yaml loader that also reads 1e-3 as a float.
    """


RunFileLoader.add_implicit_resolver('tag:yaml.org,2002:float', EXP_FLOAT, list('-+0123456789'))


def rel_to_abs(*path_parts):
    """
    Convert an internally relative path to an absolute one.
    """
    return os.path.join(ROOT_DIR, *path_parts)


def load_yaml(fname):
    """
    Load a yaml document from fname.

    Raises:
        MissingConfigFile: The file does not exist.
    """
    try:
        with open(fname) as fin:
            return yaml.load(fin, Loader=Loader)
    except FileNotFoundError:
        raise hdl.exc.MissingConfigFile("Missing {}. Expected at: {}".format(
            os.path.basename(fname), fname))


def get_config(*keys, default=None):
    """
    Return keys straight from yaml config.

    Args:
        keys: The keys going down the config.
        default: A default value to return. If not set, will raise KeyError.

    Raises:
        KeyError: If no default set and keys were not in config.
    """
    conf = load_yaml(YAML_FILE)

    try:
        for key in keys:
            conf = conf[key]

        return conf
    except KeyError:
        if default is not None:
            return default

        raise


def init_logging():  # pragma: no cover
    """
    Initialize project wide logging. See config file for details and reference on module.

     - On every start the file logs are rolled over.
     - This must be the first invocation on startup to set up logging.
    """
    log_file = rel_to_abs(get_config('paths', 'log_conf'))
    lconf = load_yaml(log_file)

    for handler in lconf['handlers']:
        try:
            os.makedirs(os.path.dirname(lconf['handlers'][handler]['filename']))
        except (OSError, KeyError):
            pass

    logging.config.dictConfig(lconf)

    print(LOG_MSG, file=sys.stderr)
    for name in lconf['handlers']:
        node = lconf['handlers'][name]
        if 'RotatingFileHandler' not in node['class']:
            continue

        for handler in logging.getLogger(name).handlers:
            if isinstance(handler, logging.handlers.RotatingFileHandler):
                print('    %s -> %s' % (name, handler.baseFilename), file=sys.stderr)
                handler.doRollover()


def parse_run_file(fname):
    """
    Parse a flat run file of key=value lines into a nested dict.

    Dotted keys nest, values are typed by yaml so 1e-3, 8, true and [16, 24] all work.
    Blank lines and lines starting with '#' are skipped.

    Raises:
        MissingConfigFile: fname does not exist.
        InvalidConfig: A line is not of the form key=value.
    """
    try:
        with open(fname) as fin:
            lines = fin.readlines()
    except FileNotFoundError:
        raise hdl.exc.MissingConfigFile("Missing run file. Expected at: " + fname)

    conf = {}
    for num, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue

        key, sep, val = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise hdl.exc.InvalidConfig("{}:{} expected key=value, got: {}".format(
                fname, num, line))

        node = conf
        parts = key.split('.')
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = yaml.load(val.strip(), Loader=RunFileLoader) if val.strip() else None

    return conf


def merge_config(base, override):
    """
    Recursively overlay override onto a copy of base. Neither input is modified.
    """
    merged = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], val)
        else:
            merged[key] = val

    return merged


def thread_cap():
    """
    Number of concurrent jobs allowed. HDL_THREADS caps it, default is the CPU count.
    """
    cpus = os.cpu_count() or 1
    try:
        cap = int(os.environ.get(THREADS_ENV, cpus))
    except ValueError:
        logging.getLogger(__name__).warning("Ignoring non integer %s", THREADS_ENV)
        cap = cpus

    return max(1, cap)


ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
YAML_FILE = rel_to_abs('data', 'config.yml')
