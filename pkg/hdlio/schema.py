"""
Record types written to reports, one per kind of table row.

Each record lists its columns in keys, the CSV header and JSON field order follow it.
"""
import math

import hdlio


class Record():
    """
    Base of all report rows. Subclasses set keys and may override validate.
    """
    keys = []
    kind = 'record'

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.keys)
        if unknown:
            raise ValueError("Unknown fields for {}: {}".format(self.__class__.__name__,
                                                                ', '.join(sorted(unknown))))
        for key in self.keys:
            setattr(self, key, kwargs.get(key))
        self.validate()

    def __repr__(self):
        kwargs = ['{}={!r}'.format(key, getattr(self, key)) for key in self.keys]

        return "{}({})".format(self.__class__.__name__, ', '.join(kwargs))

    def __eq__(self, other):
        return isinstance(other, self.__class__) and self.values() == other.values()

    def validate(self):
        """ Hook for field checks, raises ValueError. """

    def values(self):
        """ Field values in keys order. """
        return [getattr(self, key) for key in self.keys]

    def to_dict(self):
        """ JSON form tagged with the schema version. """
        data = {'schema': hdlio.SCHEMA_VERSION, 'kind': self.kind}
        for key in self.keys:
            val = getattr(self, key)
            data[key] = None if isinstance(val, float) and not math.isfinite(val) else val
        return data


class LevelRecord(Record):
    """
    One analytic level with its Higgs scalars.
    """
    keys = ['N', 'lambda', 'E', 'degeneracy', 'm_bar', 'm_under', 'C', 'c3', 'c1', 'c0', 'k',
            'E_nonrel']
    kind = 'level'

    def validate(self):
        if self.N is None or self.N < 0:
            raise ValueError("Level number must be a natural number.")
        if self.degeneracy != self.N // 2 + 1:
            raise ValueError("Degeneracy must equal [N/2] + 1.")

    @classmethod
    def from_level(cls, level, scal, nonrel=None):
        """ nonrel fills the E_nonrel column, left empty when None. """
        return cls(**{
            'N': level.N, 'lambda': level.lam, 'E': level.E, 'degeneracy': level.d,
            'm_bar': scal.m_bar, 'm_under': scal.m_under[level.lam], 'C': scal.C,
            'c3': scal.c3, 'c1': scal.c1, 'c0': scal.c0, 'k': level.k, 'E_nonrel': nonrel,
        })


class ConditionRecord(Record):
    """
    A commutation condition of one generator.
    """
    keys = ['generator', 'label', 'condition', 'passed', 'residual']
    kind = 'condition'

    @classmethod
    def from_report(cls, report):
        """ One record per condition of a ConditionReport dict. """
        return [cls(generator=report['generator'], **cond) for cond in report['conditions']]


class ResidualRecord(Record):
    """
    Commutator residual of a realized generator with H on one grid.
    """
    keys = ['generator', 'grid', 'k', 'full', 'projected', 'hermitian_defect']
    kind = 'residual'


class HiggsRecord(Record):
    """
    Higgs algebra residuals on one level.
    """
    keys = ['N', 'k', 'grid', 'E_analytic', 'E_grid', 'd', 'lambda', 'ladder', 'cubic',
            'casimir', 'weights', 'leakage']
    kind = 'higgs'

    @classmethod
    def from_frame_report(cls, report, grid):
        res = report['residuals']
        return cls(**{
            'N': report['N'], 'k': report['k'], 'grid': grid,
            'E_analytic': report['E_analytic'], 'E_grid': report['E_grid'],
            'd': report['d'], 'lambda': report['lam'], 'ladder': res['ladder'],
            'cubic': res['cubic'], 'casimir': res['casimir'], 'weights': res['weights'],
            'leakage': report['leakage'],
        })


class ConvergenceRecord(Record):
    """
    An error measure on one grid of a refinement study.
    """
    keys = ['study', 'k', 'name', 'grid', 'h', 'error', 'order']
    kind = 'convergence'

    def validate(self):
        if self.h is None or self.h <= 0:
            raise ValueError("Grid step must be positive.")


class LimitRecord(Record):
    """
    k -> 0 and nonrelativistic comparison for one level.
    """
    keys = ['N', 'E_k0', 'E_small', 'diff_k0', 'E_rel_minus_1', 'E_nonrel', 'lambda', 'gap']
    kind = 'limit'

    @classmethod
    def from_row(cls, row):
        """ From a row of hdl.spectrumlab.limit_rows. """
        return cls(**row)


class EigenRecord(Record):
    """
    A clustered grid level.
    """
    keys = ['index', 'E', 'multiplicity', 'spread']
    kind = 'eigen'
