"""
Everything related to parsing arguments from the command line.

By setting defaults on each subparser (cmd) the dispatcher knows
which action to invoke. Flags left unset stay None so the run file and
data/config.yml can fill them in.
"""
import argparse
from argparse import RawDescriptionHelpFormatter as RawHelp

import hdl.exc

PARSERS = []


class ThrowArggumentParser(argparse.ArgumentParser):
    """
    ArgumentParser subclass that does NOT terminate the program.
    """
    def print_help(self, file=None):  # pylint: disable=redefined-builtin
        raise hdl.exc.ArgumentHelpError(self.format_help())

    def error(self, message):
        raise hdl.exc.ArgumentParseError(message)

    def exit(self, status=0, message=None):
        """
        Suppress default exit behaviour.
        """
        raise hdl.exc.ArgumentParseError(message)


def int_pair(text):
    """ '32' -> (32, 32), '32,24' -> (32, 24) """
    parts = text.split(',')
    try:
        vals = [int(part) for part in parts]
    except ValueError:
        raise argparse.ArgumentTypeError("expected M or M1,M2, got: " + text)
    if len(vals) not in (1, 2):
        raise argparse.ArgumentTypeError("expected M or M1,M2, got: " + text)

    return (vals[0], vals[-1])


def float_pair(text):
    """ '8' -> (8.0, 8.0), '8,6' -> (8.0, 6.0) """
    parts = text.split(',')
    try:
        vals = [float(part) for part in parts]
    except ValueError:
        raise argparse.ArgumentTypeError("expected L or L1,L2, got: " + text)
    if len(vals) not in (1, 2):
        raise argparse.ArgumentTypeError("expected L or L1,L2, got: " + text)

    return (vals[0], vals[-1])


def int_list(text):
    """ '16,24,32' -> [16, 24, 32] """
    try:
        return [int(part) for part in text.split(',') if part]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers, got: " + text)


def float_list(text):
    """ '0.5,1,2' -> [0.5, 1.0, 2.0] """
    try:
        return [float(part) for part in text.split(',') if part]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got: " + text)


def level_range(text):
    """ '0..3' -> (0, 3), '2' -> (2, 2) """
    lo, sep, hi = text.partition('..')
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise argparse.ArgumentTypeError("expected N or N1..N2, got: " + text)
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError("expected 0 <= N1 <= N2, got: " + text)

    return (lo, hi)


def operator_block(text):
    """ 'Q12=x1^2' -> ('q12', 'x1^2') """
    name, sep, expr = text.partition('=')
    name = name.strip().lower()
    if not sep or name not in ('q11', 'q12', 'q22'):
        raise argparse.ArgumentTypeError("expected Q12=expr, Q22=expr or Q11=expr, got: " + text)

    return (name, expr.strip())


def make_parser():
    """
    Returns the hdl parser.
    """
    parser = ThrowArggumentParser(prog='hdl', description='Dirac Smorodinsky-Winternitz '
                                  'spectrum and Higgs algebra laboratory.')

    subs = parser.add_subparsers(title='subcommands',
                                 description='The subcommands of hdl')

    for func in PARSERS:
        func(subs)

    return parser


def register_parser(func):
    """ Simple registration function, use as decorator. """
    PARSERS.append(func)
    return func


def add_output(sub):
    """ Options shared by every subcommand. """
    sub.add_argument('--config', help='Flat key=value run file overriding data/config.yml.')
    sub.add_argument('--out', help='Write the report here instead of stdout.')
    sub.add_argument('--format', choices=['csv', 'json', 'text'], help='Report format.')


def add_grid(sub):
    """ Options selecting the grid and coupling. """
    sub.add_argument('--k', type=float, help='Coupling k >= 0.')
    sub.add_argument('--grid', type=int_pair, help='Interior points M or M1,M2.')
    sub.add_argument('--box', type=float_pair, help='Box half widths L or L1,L2.')
    sub.add_argument('--backend', choices=['fourier', 'central'], help='Derivative backend.')
    sub.add_argument('--full-plane', action='store_true', default=None,
                     help='Use x2 in [-L2, L2] instead of (0, L2].')
    sub.add_argument('--cluster-tol', type=float, help='Eigenvalue clustering tolerance.')


@register_parser
def subs_spectrum(subs):
    """ Subcommand parsing for spectrum """
    desc = """Analytic levels N = 0..N_max with degeneracy, weights and Casimir value.

    hdl spectrum --k 0 --n-max 2
    hdl spectrum --k 0 --nonrel --format text
    """
    sub = subs.add_parser('spectrum', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='Spectrum')
    add_output(sub)
    sub.add_argument('--k', type=float, help='Coupling k >= 0.')
    sub.add_argument('--n-max', type=int, help='Highest level N.')
    sub.add_argument('--tol', type=float, help='Root tolerance.')
    sub.add_argument('--nonrel', action='store_true', help='Add the nonrelativistic column.')
    sub.add_argument('--polish', action='store_true', help='Refine roots with Brent.')


@register_parser
def subs_verify_symbolic(subs):
    """ Subcommand parsing for verify-symbolic """
    desc = """Check the commutation conditions exactly, formal in k.

    hdl verify-symbolic
    hdl verify-symbolic --k-numeric 1.5
    hdl verify-symbolic --operator "Q12=0" --operator "Q22=pinv2*p1^2"
    """
    sub = subs.add_parser('verify-symbolic', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='VerifySymbolic')
    add_output(sub)
    sub.add_argument('--operator', type=operator_block, action='append',
                     help='Block of a custom candidate, Q12=expr or Q22=expr.')
    sub.add_argument('--name', default='custom', help='Name of the custom candidate.')
    sub.add_argument('--k-numeric', type=float, help='Substitute k before checking.')


@register_parser
def subs_verify_numeric(subs):
    """ Subcommand parsing for verify-numeric """
    desc = """Conservation table of the realized generators, L as negative control.

    hdl verify-numeric --k 1 --grid 32
    hdl verify-numeric --k 1 --grid 16 --dump-matrices /tmp/mats
    """
    sub = subs.add_parser('verify-numeric', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='VerifyNumeric')
    add_output(sub)
    add_grid(sub)
    sub.add_argument('--count', type=int, help='Number of lowest levels to project on.')
    sub.add_argument('--dump-matrices', metavar='DIR', help='Export H, T and eigen report.')


@register_parser
def subs_higgs(subs):
    """ Subcommand parsing for higgs """
    desc = """Higgs algebra residuals on each clustered level.

    hdl higgs --k 1 --levels 0..3
    """
    sub = subs.add_parser('higgs', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='Higgs')
    add_output(sub)
    add_grid(sub)
    sub.add_argument('--levels', type=level_range, help='Levels N1..N2.')


@register_parser
def subs_converge(subs):
    """ Subcommand parsing for converge """
    desc = """Refinement study over several grids with fitted orders.

    hdl converge --k 1 --grids 16,24,32
    hdl converge --ks 0.5,1,2 --study higgs --count 3
    hdl converge --study canonical --grids 16,32,64
    """
    sub = subs.add_parser('converge', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='Converge')
    add_output(sub)
    add_grid(sub)
    sub.add_argument('--grids', type=int_list, help='Resolutions M, comma separated.')
    sub.add_argument('--ks', type=float_list, help='Couplings swept when --k is not given.')
    sub.add_argument('--count', type=int, help='Number of lowest levels studied.')
    sub.add_argument('--study', choices=['energy', 'nonrel', 'conservation', 'higgs', 'canonical'],
                     action='append', help='Studies to run, all but higgs by default.')


@register_parser
def subs_limits(subs):
    """ Subcommand parsing for limits """
    desc = """k -> 0 and nonrelativistic limits, weight branch per level.

    hdl limits --k 1 --n-max 5
    """
    sub = subs.add_parser('limits', description=desc, formatter_class=RawHelp)
    sub.set_defaults(cmd='Limits')
    add_output(sub)
    sub.add_argument('--k', type=float, help='Coupling k >= 0.')
    sub.add_argument('--n-max', type=int, help='Highest level N.')
    sub.add_argument('--k-small', type=float, default=1e-6, help='Small k probing k -> 0.')
