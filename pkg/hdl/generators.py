"""
Constants of motion of block form

    T = [[ Q11,      Q12 B   ],
         [ B^+ Q21,  B^+ Q22 B]]      B = p1 - i p2

and the four conditions their blocks must satisfy for [T, H] = 0 with
H = [[1 + V, B], [B^+, -1]]:

    (i)   Q21 == Q12
    (ii)  [Q11, V] + [Q12, p^2] == 0
    (iii) [Q12, V] + [Q22, p^2] == 0
    (iv)  Q11 == Q12 (2 + V) + Q22 p^2

The builtin blocks are kept with the operator ordering exactly as printed in the literature,
written in the text grammar of hdl.opparse. Only Q12 and Q22 are independent, Q21 is Q12 and
Q11 follows from (iv).
"""
import logging

import hdl.exc
import hdl.symalg
from hdl.opparse import parse_operator
from hdl.symalg import (P_SQ, absorb_p2_right, adjoint, commutator, format_expr, is_zero, mul)

CONDITIONS = ('i', 'ii', 'iii', 'iv')
CONDITION_TEXT = {
    'i': 'Q21 == Q12',
    'ii': '[Q11,V] + [Q12,p^2] == 0',
    'iii': '[Q12,V] + [Q22,p^2] == 0',
    'iv': 'Q11 == Q12(2+V) + Q22 p^2',
}
BUILTIN_TEXT = {
    'D1': {
        'q12': "x1^2*(x2^2 - k*x2^-2)*(2 + 1/2*x1^2 + 1/2*x2^2 + 1/2*k*x2^-2)"
               " - 2*(x1*p2 - x2*p1)*(x1*p2 - x2*p1) + 2*p1^2*k*x2^-2"
               " + 2*x1*x2*p1*p2 + 2*p1*p2*x1*x2",
        # 4 p1^2 p2^2 / p^2 with the inverse on the left, the numerator commutes with p^2.
        'q22': "x1^2*(x2^2 - k*x2^-2) + 4*pinv2*p1^2*p2^2",
    },
    'D2': {
        'q12': "x1^2*(x2*p2 + p2*x2) - (x2^2 - k*x2^-2)*(x1*p1 + p1*x1)",
        'q22': "2*pinv2*(p2^2*(x1*p1 + p1*x1) - p1^2*(x2*p2 + p2*x2))",
    },
    'Q3': {
        'q12': "1/2*(x1^2 - x2^2 - k*x2^-2)",
        'q22': "pinv2*(p1^2 - p2^2)",
    },
    'L': {
        'q12': "0",
        'q22': "pinv2*(x1*p2 - x2*p1)",
    },
}


class GeneratorEntry():
    """
    The four blocks of one constant of motion candidate.

    k is None while the blocks are formal in k, else the number substituted for it.
    """
    def __init__(self, name, q12, q22, *, q11=None, q21=None, k=None):
        self.name = name
        self.k = k
        self.q12 = q12
        self.q22 = q22
        self.q21 = q12 if q21 is None else q21
        self.q11 = derive_q11(q12, q22, self.potential()) if q11 is None else q11

    def __repr__(self):
        keys = ['name', 'q11', 'q12', 'q21', 'q22']
        kwargs = ['{}={!r}'.format(key, str(getattr(self, key))) for key in keys]

        return "{}({})".format(self.__class__.__name__, ', '.join(kwargs))

    def __eq__(self, other):
        return isinstance(other, GeneratorEntry) and self.name == other.name \
            and (self.q11, self.q12, self.q21, self.q22) == \
            (other.q11, other.q12, other.q21, other.q22)

    def __hash__(self):
        return hash((self.name, self.q12, self.q22))

    def subs_k(self, value):
        """ Copy with the formal k replaced by value in every block. """
        return GeneratorEntry(self.name, self.q12.subs_k(value), self.q22.subs_k(value),
                              q11=self.q11.subs_k(value), q21=self.q21.subs_k(value),
                              k=value)

    def potential(self):
        """ V_sw at the k of this entry, formal while k is None. """
        return hdl.symalg.sw_potential(self.k)


class GeneratorDefs():
    """
    Named GeneratorEntry objects, reachable by attribute (defs.D1) or item (defs['D1']).
    """
    def __init__(self, entries):
        self.entries = {entry.name: entry for entry in entries}

    def __getattr__(self, name):
        try:
            return self.__dict__['entries'][name]
        except KeyError:
            raise AttributeError(name)

    def __getitem__(self, name):
        return self.entries[name]

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def names(self):
        """ Names in insertion order. """
        return list(self.entries)


class ConditionReport():
    """
    Outcome of the four conditions for one generator.

    Attributes:
        name: Generator name.
        passed: dict condition label -> bool.
        residuals: dict condition label -> OperatorExpr, zero when passed.
        notes: Extra facts established while checking, e.g. residue commutation.
    """
    def __init__(self, name):
        self.name = name
        self.passed = {}
        self.residuals = {}
        self.notes = []

    def record(self, label, residual):
        """ Store the residual of a condition, passing iff it is zero. """
        self.residuals[label] = residual
        self.passed[label] = is_zero(residual)

    @property
    def all_passed(self):
        """ True when every condition holds. """
        return all(self.passed[label] for label in CONDITIONS)

    @property
    def failed(self):
        """ Labels of failed conditions in order. """
        return [label for label in CONDITIONS if not self.passed[label]]

    def verdict(self):
        """ Short text such as 'D1 PASS' or 'L FAIL(ii)'. """
        if self.all_passed:
            return '{} PASS'.format(self.name)
        return '{} FAIL({})'.format(self.name, ','.join(self.failed))

    def to_dict(self):
        """ JSON ready form with residuals as text. """
        return {
            'generator': self.name,
            'passed': self.all_passed,
            'conditions': [{
                'label': label,
                'condition': CONDITION_TEXT[label],
                'passed': self.passed[label],
                'residual': format_expr(self.residuals[label]),
            } for label in CONDITIONS],
            'notes': list(self.notes),
        }

    def __repr__(self):
        return "{}({!r})".format(self.__class__.__name__, self.verdict())


def derive_q11(q12, q22, potential=None):
    """
    Q11 from condition (iv): Q12 (2 + V) + Q22 p^2, with p^2 absorbed into any pinv2 part.
    """
    potential = hdl.symalg.sw_potential() if potential is None else potential
    return mul(q12, potential + 2) + absorb_p2_right(q22)


def make_generator(name, q12, q22, *, q11=None):
    """
    Build a GeneratorEntry from expressions or grammar text.

    Raises:
        ExprParseError: A text block does not parse.
    """
    def read(val):
        return parse_operator(val) if isinstance(val, str) else val

    q11 = read(q11) if q11 is not None else None
    return GeneratorEntry(name, read(q12), read(q22), q11=q11)


def builtin_generators():
    """
    The three Higgs generators D1, D2, Q3 and the orbital momentum L, as GeneratorDefs.
    """
    return GeneratorDefs(make_generator(name, text['q12'], text['q22'])
                         for name, text in BUILTIN_TEXT.items())


def residue_commutation(q22):
    """
    For each pinv2^s R part of q22 return (s, [R, p^2]).
    """
    return [(power, commutator(residue, P_SQ)) for power, residue in q22.pinv_parts().items()]


def verify_conditions(entry, potential=None):
    """
    Check the four conditions for entry with potential V, formal in k.

    Args:
        entry: GeneratorEntry to check.
        potential: Position only OperatorExpr, default V_sw at the k of entry.

    Returns: A ConditionReport.

    Raises:
        UnverifiableStructure: V is not position only or pinv2 appears outside Q22.
        OrderingViolation: Propagated from products that cannot be normal ordered.
    """
    log = logging.getLogger(__name__)
    potential = entry.potential() if potential is None else potential
    if not potential.is_position_only:
        raise hdl.exc.UnverifiableStructure("unverifiable Q22 structure: V must be position only")
    if entry.q11.has_pinv or entry.q12.has_pinv or entry.q21.has_pinv:
        raise hdl.exc.UnverifiableStructure(
            "unverifiable Q22 structure: pinv2 allowed only in Q22 of " + entry.name)

    report = ConditionReport(entry.name)
    report.record('i', entry.q21 - entry.q12)
    report.record('ii', commutator(entry.q11, potential) + commutator(entry.q12, P_SQ))

    for power, defect in residue_commutation(entry.q22):
        if is_zero(defect):
            report.notes += ['[R, p^2] == 0 for the pinv2^{} part of Q22'.format(power)]
        else:
            report.notes += ['[R, p^2] != 0 for the pinv2^{} part of Q22: {}'.format(
                power, format_expr(defect))]
    report.record('iii', commutator(entry.q12, potential) + commutator(entry.q22, P_SQ))

    try:
        expect = mul(entry.q12, potential + 2) + absorb_p2_right(entry.q22)
    except hdl.exc.NonCommutingResidue as exc:
        raise hdl.exc.UnverifiableStructure("unverifiable Q22 structure: " + exc.reply())
    report.record('iv', entry.q11 - expect)

    log.debug("%s: %s", entry.name, report.verdict())
    return report


def hermiticity_report(entry):
    """
    Which blocks equal their adjoint after normal ordering.

    Q22 is split into its s = 0 part and the residues R of its pinv2^s R parts; pinv2^s R is
    Hermitian when R is and [R, p^2] = 0, which is recorded alongside.

    Returns:
        dict name -> bool with keys q11, q12, q22_regular, q22_residue_<s> and
        q22_residue_<s>_commutes.
    """
    result = {
        'q11': adjoint(entry.q11) == entry.q11,
        'q12': adjoint(entry.q12) == entry.q12,
        'q22_regular': adjoint(entry.q22.regular_part()) == entry.q22.regular_part(),
    }
    for power, residue in entry.q22.pinv_parts().items():
        result['q22_residue_{}'.format(power)] = adjoint(residue) == residue
        result['q22_residue_{}_commutes'.format(power)] = is_zero(commutator(residue, P_SQ))

    return result
