"""
Writers and readers for reports and matrices.

Reports
-------
    csv  - '# hdl <version> <timestamp>' line, header row, one row per record, the first
           column holds the schema version
    json - array of record objects, each tagged with "schema", no timestamp
    text - same first line as csv, then an ASCII table

Matrices
--------
    binary - fixed header (magic, version, rows, cols, layout tag) then row major
             little endian complex doubles
    csv    - one matrix row per line, entries like 1.5-2j, small matrices only
"""
import csv
import datetime
import io
import json
import logging

import numpy as np

import hdl
import hdl.exc
import hdl.tbl
import hdlio
from hdlio.schema import EigenRecord

FORMATS = ('csv', 'json', 'text')
MATRIX_MAGIC = b'HDLM'
MATRIX_LAYOUT = b'rowmajor-c16'
MATRIX_HEADER = np.dtype([('magic', 'S4'), ('version', '<u4'), ('rows', '<u8'), ('cols', '<u8'),
                          ('layout', 'S16')])
CSV_MATRIX_MAX = 256


def stamp_line(now=None):
    """ First line of csv and text reports. """
    now = now or datetime.datetime.now(datetime.timezone.utc)
    return '# hdl {} {}'.format(hdl.__version__, now.strftime('%Y-%m-%dT%H:%M:%SZ'))


def csv_text(records, now=None):
    """
    Records of one type as csv text.
    """
    buf = io.StringIO()
    buf.write(stamp_line(now) + '\n')
    if records:
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(['schema'] + list(records[0].keys))
        for rec in records:
            writer.writerow([hdlio.SCHEMA_VERSION] + ['' if val is None else val
                                                      for val in rec.values()])

    return buf.getvalue()


def json_text(records):
    """
    Records as a JSON array, deterministic for equal input.
    """
    return json.dumps([rec.to_dict() for rec in records], indent=2, sort_keys=False) + '\n'


def table_text(records, now=None):
    """
    Records as an ASCII table under the stamp line.
    """
    lines = [stamp_line(now)]
    if records:
        rows = [list(records[0].keys)] + [rec.values() for rec in records]
        lines += [hdl.tbl.format_table(rows, header=True)]

    return '\n'.join(lines) + '\n'


def format_report(records, fmt, now=None):
    """
    Render records in fmt, one of FORMATS.

    Raises:
        InvalidCommandArgs: Unknown format.
    """
    if fmt == 'csv':
        return csv_text(records, now)
    if fmt == 'json':
        return json_text(records)
    if fmt == 'text':
        return table_text(records, now)

    raise hdl.exc.InvalidCommandArgs("Unknown format '{}', choose from: {}".format(
        fmt, ', '.join(FORMATS)))


def write_report(records, fmt, path=None, now=None):
    """
    Render records and write them to path atomically. Without path only render.

    Returns: The rendered text.
    """
    text = format_report(records, fmt, now)
    if path:
        with hdlio.report_scope(path) as fout:
            fout.write(text)

    return text


def read_json_report(path):
    """ Load a JSON report back as a list of dicts. """
    with open(path) as fin:
        return json.load(fin)


def eigen_report(k, spec, spaces):
    """
    {k, grid, levels} for clustered grid levels, each level an EigenRecord dict.
    """
    return {
        'schema': hdlio.SCHEMA_VERSION,
        'k': k,
        'grid': {'M1': spec.M1, 'M2': spec.M2, 'L1': spec.L1, 'L2': spec.L2,
                 'half_plane': spec.half_plane, 'backend': spec.backend,
                 'wall_map': spec.wall_map},
        'levels': [EigenRecord(index=ind, E=space.energy, multiplicity=space.multiplicity,
                               spread=space.spread).to_dict()
                   for ind, space in enumerate(spaces)],
    }


def write_eigen_report(path, k, spec, spaces):
    """ Write eigen_report as JSON to path. """
    with hdlio.report_scope(path) as fout:
        json.dump(eigen_report(k, spec, spaces), fout, indent=2)
        fout.write('\n')


def write_matrix(path, mat):
    """
    Write a 2D matrix in the binary format.
    """
    mat = np.ascontiguousarray(mat, dtype='<c16')
    header = np.zeros(1, dtype=MATRIX_HEADER)
    header[0] = (MATRIX_MAGIC, hdlio.SCHEMA_VERSION, mat.shape[0], mat.shape[1], MATRIX_LAYOUT)
    with hdlio.report_scope(path, 'wb') as fout:
        fout.write(header.tobytes())
        fout.write(mat.tobytes())


def read_matrix(path):
    """
    Read a matrix written by write_matrix.

    Raises:
        InvalidConfig: Wrong magic, layout or payload size.
    """
    with open(path, 'rb') as fin:
        raw = fin.read()

    if len(raw) < MATRIX_HEADER.itemsize:
        raise hdl.exc.InvalidConfig("Truncated matrix file: " + path)
    header = np.frombuffer(raw[:MATRIX_HEADER.itemsize], dtype=MATRIX_HEADER)[0]
    if header['magic'] != MATRIX_MAGIC or header['layout'] != MATRIX_LAYOUT:
        raise hdl.exc.InvalidConfig("Not an hdl matrix file: " + path)

    rows, cols = int(header['rows']), int(header['cols'])
    payload = np.frombuffer(raw[MATRIX_HEADER.itemsize:], dtype='<c16')
    if payload.size != rows * cols:
        raise hdl.exc.InvalidConfig("Matrix payload size mismatch in: " + path)

    return payload.reshape(rows, cols).copy()


def write_matrix_csv(path, mat):
    """
    Write a small matrix as csv text.

    Raises:
        InvalidCommandArgs: Matrix larger than CSV_MATRIX_MAX in either dimension.
    """
    mat = np.asarray(mat, dtype=complex)
    if max(mat.shape) > CSV_MATRIX_MAX:
        raise hdl.exc.InvalidCommandArgs("Matrix {}x{} too large for csv, use binary.".format(
            *mat.shape))

    with hdlio.report_scope(path) as fout:
        writer = csv.writer(fout, lineterminator='\n')
        for row in mat:
            writer.writerow([format(complex(val), '.17g') for val in row])


def read_matrix_csv(path):
    """ Read a matrix written by write_matrix_csv. """
    with open(path, newline='') as fin:
        return np.array([[complex(val) for val in row] for row in csv.reader(fin)])


def dump_matrices(dirname, ops, *, csv_small=True):
    """
    Write each named matrix of ops to dirname as <name>.bin, plus <name>.csv when small.

    Returns: List of written paths.
    """
    log = logging.getLogger(__name__)
    written = []
    for name, mat in ops.items():
        base = '{}/{}'.format(dirname, name)
        write_matrix(base + '.bin', mat)
        written += [base + '.bin']
        if csv_small and max(np.shape(mat)) <= CSV_MATRIX_MAX:
            write_matrix_csv(base + '.csv', mat)
            written += [base + '.csv']
    log.info("Dumped %d matrix files to %s", len(written), dirname)

    return written
