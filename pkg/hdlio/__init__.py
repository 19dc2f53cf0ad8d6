"""
All report and matrix file handling resides under this module.
Only one rule, no format logic outside of it.

Useful Documentation
--------------------
csv module:
    https://docs.python.org/3/library/csv.html
numpy binary files:
    https://numpy.org/doc/stable/reference/generated/numpy.ndarray.tofile.html
"""
import logging
import os
import tempfile
from contextlib import contextmanager

SCHEMA_VERSION = 1


def current_umask():
    """ The process umask, os only offers it through a set. """
    mask = os.umask(0o022)
    os.umask(mask)
    return mask


@contextmanager
def report_scope(path, mode='w'):
    """
    Provide an all or nothing scope for writing one file.

    Output goes to a temporary file beside path that replaces path on success and is
    removed when the body raises. The final file gets the usual 0666 & ~umask mode.

    args:
        path: Final destination.
        mode: 'w' for text, 'wb' for binary.
    """
    dirname = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirname, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix='.hdl', dir=dirname)
    fout = os.fdopen(fd, mode) if 'b' in mode else os.fdopen(fd, mode, newline='')
    try:
        yield fout
        fout.close()
        os.chmod(tmp, 0o666 & ~current_umask())
        os.replace(tmp, path)
        logging.getLogger(__name__).info('Wrote %s', path)
    except:  # noqa: E722
        fout.close()
        os.remove(tmp)
        raise
