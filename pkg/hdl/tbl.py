#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Any logic having to do with formatting an ASCII table of results.

String formatting reference:
  https://pyformat.info/#string_pad_align
"""
import numbers

FLOAT_FMT = '{:.6g}'


def format_cell(data, float_fmt=FLOAT_FMT):
    """
    Render a single cell. Floats use float_fmt, booleans read PASS/FAIL, None is blank.
    """
    if data is None:
        return ''
    if isinstance(data, bool):
        return 'PASS' if data else 'FAIL'
    if isinstance(data, numbers.Integral):
        return str(data)
    if isinstance(data, numbers.Real):
        return float_fmt.format(float(data))

    return str(data)


def max_col_width(lines):
    """
    Iterate all lines and entries.

    Returns: A list of numbers, the max width required for each
             column given the data.
    """
    lens = [[] for _ in lines[0]]

    for line in lines:
        for ind, data in enumerate(line):
            lens[ind].append(len(data))

    return [max(len_list) for len_list in lens]


def numeric_columns(rows):
    """
    Columns whose every non blank entry is a number get right aligned.
    """
    if not rows:
        return []

    flags = []
    for ind in range(len(rows[0])):
        col = [row[ind] for row in rows if row[ind] is not None]
        flags += [bool(col) and all(isinstance(x, numbers.Number) and not isinstance(x, bool)
                                    for x in col)]

    return flags


def format_table(lines, sep=' | ', header=False, float_fmt=FLOAT_FMT):
    """
    This function formats a table that fits all data evenly.
    It will go down columns and choose spacing that fits largest data.
    Numeric columns are right aligned, everything else left aligned.

    args:
        lines: Each top level element is a line composed of data in a list.
        sep: String to separate data with.
        header: If true, format first line as pretty header.
        float_fmt: Format applied to floating point cells.
    """
    body = lines[1:] if header else lines
    aligns = ['>' if flag else '<' for flag in numeric_columns(body)]
    if not aligns:
        aligns = ['<' for _ in lines[0]]

    cells = [[format_cell(data, float_fmt) for data in line] for line in lines]
    pads = max_col_width(cells)

    ret_line = ''
    if header:
        head, cells = cells[0], cells[1:]
        ret_line += format_line(head, sep=sep, pads=pads, aligns=['^'] * len(pads)) + '\n'
        ret_line += format_line(['-' * pad for pad in pads], sep=sep, pads=pads) + '\n'

    for line in cells:
        ret_line += format_line(line, sep=sep, pads=pads, aligns=aligns) + '\n'

    return ret_line[:-1]


def format_line(entries, sep=' | ', pads=None, aligns=None):
    """
    Format data for use in a simple table output to text.

    args:
        entries: List of data to put in table, left to right.
        sep: String to separate data with.
        pads: List of numbers, pad each entry as you go with this number.
        aligns: List of format align characters, one per entry.
    """
    pads = pads or [0] * len(entries)
    aligns = aligns or ['<'] * len(entries)

    ents = []
    for ent, pad, align in zip(entries, pads, aligns):
        fmt = '{:%s%d}' % (align, pad) if pad else '{}'
        ents += [fmt.format(str(ent))]

    return sep.join(ents).rstrip()
