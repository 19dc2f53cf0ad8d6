"""
Command line entry point.

Configuration is layered, a flag beats the --config run file which beats data/config.yml.
The merged result is frozen into a RunConfig before any action runs.
"""
import asyncio
import dataclasses
import logging
import sys

import hdl.actions
import hdl.exc
import hdl.gridrep
import hdl.parse
import hdl.util
import hdlio.export

MAX_N = 12
# flag dest -> config keys it overrides
FLAG_KEYS = {
    'k': ('run', 'k'),
    'n_max': ('run', 'n_max'),
    'backend': ('run', 'grid', 'backend'),
    'tol': ('tolerances', 'root_tol'),
    'cluster_tol': ('tolerances', 'cluster_tol'),
    'ks': ('sweep', 'ks'),
    'grids': ('sweep', 'grids'),
    'count': ('sweep', 'levels'),
    'out': ('output', 'path'),
    'format': ('output', 'format'),
}


@dataclasses.dataclass(frozen=True)
class RunConfig():
    """
    Validated settings of one run.

    Attributes:
        k: Coupling >= 0.
        n_max: Highest analytic level.
        levels: (N1, N2) range checked by higgs.
        grid: GridSpec of single grid commands.
        tolerances: dict name -> positive threshold.
        max_dim: Cap on the dense Dirac dimension.
        allow_large_n: Lift the n_max <= 12 cap.
        sweep_ks, sweep_grids: Couplings and resolutions swept by converge.
        sweep_levels: Lowest levels projected on or studied.
        output_format, output_path: Where and how reports go.
    """
    k: float
    n_max: int
    levels: tuple
    grid: hdl.gridrep.GridSpec
    tolerances: dict
    max_dim: int
    allow_large_n: bool = False
    sweep_ks: tuple = ()
    sweep_grids: tuple = ()
    sweep_levels: int = 6
    output_format: str = 'csv'
    output_path: str = None

    def __post_init__(self):
        if self.k is None or self.k < 0:
            raise hdl.exc.InvalidConfig("k must be >= 0, got {}".format(self.k))
        for name, val in self.tolerances.items():
            if not isinstance(val, (int, float)) or not val > 0:
                raise hdl.exc.InvalidConfig("tolerance {} must be > 0, got {}".format(name, val))
        if not isinstance(self.n_max, int) or self.n_max < 0:
            raise hdl.exc.InvalidConfig("n_max must be a natural number, got {}".format(self.n_max))
        if self.n_max > MAX_N and not self.allow_large_n:
            raise hdl.exc.InvalidConfig("n_max {} above {}, set limits.allow_large_n=true to "
                                        "proceed".format(self.n_max, MAX_N))
        low, high = self.levels
        if low < 0 or high < low:
            raise hdl.exc.InvalidConfig("levels must satisfy 0 <= N1 <= N2, got {}..{}".format(
                low, high))
        if any(val < 0 for val in self.sweep_ks):
            raise hdl.exc.InvalidConfig("sweep ks must be >= 0")
        for size in self.sweep_grids:
            self.grid.refined(size)
        if self.sweep_levels < 1:
            raise hdl.exc.InvalidConfig("sweep levels must be >= 1")
        if self.output_format not in hdlio.export.FORMATS:
            raise hdl.exc.InvalidConfig("output format must be one of: " + ', '.join(
                hdlio.export.FORMATS))

    @classmethod
    def from_mapping(cls, conf):
        """
        Build from the nested dict layout of data/config.yml.

        Raises:
            InvalidConfig: A section is missing or a value violates its invariant.
        """
        try:
            run, grid = conf['run'], conf['run']['grid']
            levels = run.get('levels', [0, run['n_max']])
            return cls(
                k=run['k'],
                n_max=run['n_max'],
                levels=(int(levels[0]), int(levels[-1])),
                grid=hdl.gridrep.GridSpec(grid['M1'], grid['M2'], float(grid['L1']),
                                          float(grid['L2']), half_plane=grid['half_plane'],
                                          backend=grid['backend'],
                                          wall_map=grid.get('wall_map', True)),
                tolerances=dict(conf['tolerances']),
                max_dim=conf['limits']['max_dim'],
                allow_large_n=conf['limits'].get('allow_large_n', False),
                sweep_ks=tuple(conf['sweep']['ks']),
                sweep_grids=tuple(conf['sweep']['grids']),
                sweep_levels=conf['sweep']['levels'],
                output_format=conf['output']['format'],
                output_path=conf['output'].get('path'),
            )
        except (KeyError, TypeError) as exc:
            raise hdl.exc.InvalidConfig("Incomplete configuration, missing or malformed: {}".format(
                exc))

    def tol(self, name):
        """ Threshold by name. """
        return self.tolerances[name]


def flag_overrides(args):
    """
    Nested override dict from the flags actually given on the command line.
    """
    conf = {}

    def put(keys, val):
        node = conf
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = val

    for dest, keys in FLAG_KEYS.items():
        val = getattr(args, dest, None)
        if val is not None:
            put(keys, val)

    if getattr(args, 'grid', None):
        put(('run', 'grid', 'M1'), args.grid[0])
        put(('run', 'grid', 'M2'), args.grid[1])
    if getattr(args, 'box', None):
        put(('run', 'grid', 'L1'), args.box[0])
        put(('run', 'grid', 'L2'), args.box[1])
    if getattr(args, 'full_plane', None):
        put(('run', 'grid', 'half_plane'), False)
    if getattr(args, 'levels', None):
        put(('run', 'levels'), list(args.levels))

    return conf


def build_config(args):
    """
    Merge data/config.yml, the optional run file and the flags into a RunConfig.
    """
    conf = hdl.util.load_yaml(hdl.util.YAML_FILE)
    if getattr(args, 'config', None):
        conf = hdl.util.merge_config(conf, hdl.util.parse_run_file(args.config))

    return RunConfig.from_mapping(hdl.util.merge_config(conf, flag_overrides(args)))


async def dispatch_command(**kwargs):
    """
    Simply inspect class and dispatch command. Guaranteed to be valid.
    """
    args = kwargs.get('args')
    cls = getattr(hdl.actions, args.cmd)
    return await cls(**kwargs).execute()


def usage_help(parser, argv):
    """ The help text of the subcommand named in argv, None when there is none. """
    try:
        parser.parse_args(argv[0:1] + ['--help'])
    except hdl.exc.ArgumentHelpError as exc:
        return exc.message
    except hdl.exc.ArgumentParseError:
        return None


def run(argv=None):
    """
    Parse argv, run the chosen action and report.

    Returns: The exit code, 0 on success.
    """
    log = logging.getLogger(__name__)
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = hdl.parse.make_parser()
    command = ' '.join(argv)
    config = None

    try:
        args = parser.parse_args(argv)
        if not getattr(args, 'cmd', None):
            raise hdl.exc.ArgumentParseError('a subcommand is required')
        config = build_config(args)
        log.info("Running: %s", command)

        loop = asyncio.new_event_loop()
        try:
            loop.run_until_complete(dispatch_command(args=args, config=config))
        finally:
            loop.close()
        return 0

    except hdl.exc.ArgumentHelpError as exc:
        print(exc.message)
        return exc.exit_code

    except hdl.exc.ArgumentParseError as exc:
        exc.write_log(log, command=command)
        msg = exc.message or 'Invalid command use.'
        if argv and 'invalid choice' not in msg:
            sub_help = usage_help(parser, argv)
            if sub_help:
                msg += '\n{}\n{}'.format(len(msg) * '-', sub_help)
        print(msg, file=sys.stderr)
        return exc.exit_code

    except hdl.exc.HDLException as exc:
        exc.write_log(log, command=command, config=config)
        print('{}: {}'.format(exc.__class__.__name__, exc.reply()), file=sys.stderr)
        return exc.exit_code


def main():  # pragma: no cover
    """ Entry here! """
    hdl.util.init_logging()
    try:
        import uvloop
        asyncio.set_event_loop_policy(uvloop.EventLoopPolicy())
    except ImportError:
        pass

    return run()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
