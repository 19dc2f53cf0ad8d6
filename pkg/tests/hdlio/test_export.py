"""
Test hdlio.export module.
"""
import datetime
import json
import os

import numpy as np
import pytest

import hdl
import hdl.exc
import hdlio.export
from hdlio.schema import ConvergenceRecord, ResidualRecord

NOW = datetime.datetime(2020, 1, 2, 3, 4, 5, tzinfo=datetime.timezone.utc)


@pytest.fixture
def f_records():
    yield [
        ResidualRecord(generator='D1', grid='16x16/8x8', k=1.0, full=1e-3, projected=2e-4,
                       hermitian_defect=0.0),
        ResidualRecord(generator='L', grid='16x16/8x8', k=1.0, full=0.5, projected=0.25,
                       hermitian_defect=0.0),
    ]


def test_stamp_line():
    assert hdlio.export.stamp_line(NOW) == '# hdl {} 2020-01-02T03:04:05Z'.format(hdl.__version__)


def test_csv_text(f_records):
    lines = hdlio.export.csv_text(f_records, NOW).splitlines()

    assert lines[0] == hdlio.export.stamp_line(NOW)
    assert lines[1] == 'schema,generator,grid,k,full,projected,hermitian_defect'
    assert lines[2] == '1,D1,16x16/8x8,1.0,0.001,0.0002,0.0'
    assert len(lines) == 4


def test_csv_text_empty():
    assert hdlio.export.csv_text([], NOW) == hdlio.export.stamp_line(NOW) + '\n'


def test_json_text(f_records):
    rows = json.loads(hdlio.export.json_text(f_records))

    assert rows[1] == {'schema': hdlio.SCHEMA_VERSION, 'kind': 'residual', 'generator': 'L',
                       'grid': '16x16/8x8', 'k': 1.0, 'full': 0.5, 'projected': 0.25,
                       'hermitian_defect': 0.0}
    assert hdlio.export.json_text(f_records) == hdlio.export.json_text(f_records)


def test_json_text_nan():
    rec = ConvergenceRecord(study='energy', name='0', grid='8x8/8x8', h=0.5, error=1e-2,
                            order=float('nan'))
    assert json.loads(hdlio.export.json_text([rec]))[0]['order'] is None


def test_table_text(f_records):
    lines = hdlio.export.table_text(f_records, NOW).splitlines()

    assert lines[0] == hdlio.export.stamp_line(NOW)
    assert lines[1].split() == ['generator', '|', 'grid', '|', 'k', '|', 'full', '|',
                                'projected', '|', 'hermitian_defect']
    assert lines[3].startswith('D1 ')
    assert len(lines) == 5


def test_format_report_unknown(f_records):
    with pytest.raises(hdl.exc.InvalidCommandArgs):
        hdlio.export.format_report(f_records, 'xml')


def test_write_report(f_records, tmpdir):
    path = str(tmpdir.join('out', 'report.json'))
    text = hdlio.export.write_report(f_records, 'json', path)

    assert hdlio.export.read_json_report(path) == json.loads(text)
    assert hdlio.export.write_report(f_records, 'csv', now=NOW).startswith('# hdl ')


def test_matrix_binary(tmpdir):
    path = str(tmpdir.join('A.bin'))
    mat = np.arange(6).reshape(2, 3) + 0.5j

    hdlio.export.write_matrix(path, mat)
    got = hdlio.export.read_matrix(path)

    assert got.shape == (2, 3)
    assert np.array_equal(got, mat)
    assert os.path.getsize(path) == hdlio.export.MATRIX_HEADER.itemsize + 6 * 16


def test_matrix_binary_bad_magic(tmpdir):
    path = tmpdir.join('junk.bin')
    path.write_binary(b'JUNK' + bytes(60))

    with pytest.raises(hdl.exc.InvalidConfig):
        hdlio.export.read_matrix(str(path))


def test_matrix_binary_truncated(tmpdir):
    path = str(tmpdir.join('A.bin'))
    hdlio.export.write_matrix(path, np.eye(3))
    with open(path, 'rb') as fin:
        raw = fin.read()
    with open(path, 'wb') as fout:
        fout.write(raw[:-16])

    with pytest.raises(hdl.exc.InvalidConfig):
        hdlio.export.read_matrix(path)


def test_matrix_csv(tmpdir):
    path = str(tmpdir.join('A.csv'))
    mat = np.array([[1.5 - 2j, 0], [1j, 1 / 3]])

    hdlio.export.write_matrix_csv(path, mat)
    assert np.array_equal(hdlio.export.read_matrix_csv(path), mat)


def test_matrix_csv_too_large(tmpdir):
    size = hdlio.export.CSV_MATRIX_MAX + 1
    with pytest.raises(hdl.exc.InvalidCommandArgs):
        hdlio.export.write_matrix_csv(str(tmpdir.join('A.csv')), np.zeros((size, 1)))


def test_dump_matrices(tmpdir):
    big = np.zeros((hdlio.export.CSV_MATRIX_MAX + 1, 2))
    written = hdlio.export.dump_matrices(str(tmpdir), {'H': np.eye(2), 'T': big})

    assert sorted(os.path.basename(path) for path in written) == ['H.bin', 'H.csv', 'T.bin']


def test_eigen_report(f_small_levels, f_small_spec):
    report = hdlio.export.eigen_report(1.0, f_small_spec, f_small_levels)

    assert report['grid'] == {'M1': 20, 'M2': 28, 'L1': 6.0, 'L2': 6.0, 'half_plane': True,
                              'backend': 'fourier', 'wall_map': True}
    assert [level['multiplicity'] for level in report['levels']] == [1, 1, 2, 2]
    assert report['levels'][0]['E'] == pytest.approx(f_small_levels[0].energy)
