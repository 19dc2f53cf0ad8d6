"""
To facilitate complex runs based on subcommands create a
hierarchy of actions, one per subcommand.
All actions have async execute methods.

Independent jobs (grids, levels, generators) are handed to a thread pool capped
by HDL_THREADS and gathered in submission order, so reports do not depend on scheduling.
"""
import asyncio
import concurrent.futures
import dataclasses
import functools
import logging
import os

import hdl.converge
import hdl.exc
import hdl.generators
import hdl.gridrep
import hdl.higgscheck
import hdl.spectrumlab
import hdl.symalg
import hdl.util
import hdlio
import hdlio.export
from hdlio.schema import (ConditionRecord, ConvergenceRecord, HiggsRecord, LevelRecord,
                          LimitRecord, ResidualRecord)

CONSERVED = ('D1', 'D2', 'Q3')
HIGGS_TRIPLE = ('D1', 'D2', 'Q3')
STUDIES = ('energy', 'nonrel', 'conservation', 'higgs', 'canonical')
DEFAULT_STUDIES = ('energy', 'nonrel', 'conservation', 'canonical')
GAP_TOL = 1e-8
K0_TOL = 1e-3
CONTROL_FACTOR = 2.0
EQUATIONS = {
    'hermitian': 'Hermiticity H = H^+',
    'factor': 'factorization B^+ B = p^2',
    'degeneracy': 'degeneracy d = [N/2] + 1',
    'gap': 'weight gap m_bar - m_under = [N/2]',
    'k0': 'k -> 0 limit sqrt((E+1)/2)(E-1) = N + 2',
    'ladder': 'ladder relation [D3, D+-] = +-D+-',
    'cubic': 'cubic relation [D+, D-] = c3 D3^3 + c1 D3 + c0',
    'casimir': 'Casimir value on the level',
    'weights': 'weight ladder m_under, ..., m_bar',
    'energy': 'energy convergence under refinement',
    'conservation': 'conservation [T, H] -> 0 under refinement',
    'control': 'negative control, L residual flat under refinement for k > 0',
    'order': 'observed order of convergence',
    'canonical': 'canonical relation [x1, p1] = i under refinement',
    'higgs': 'Higgs residuals decrease under refinement',
}


def solver_options(cfg):
    """ Pseudoinverse cutoff, dimension cap and eigen residual threshold of a RunConfig. """
    return {
        'cutoff': cfg.tol('pinv_cutoff'),
        'max_dim': cfg.max_dim,
        'residual_tol': cfg.tol('eigen_residual'),
    }


class Action():
    """
    Top level action, contains shared logic.
    """
    def __init__(self, **kwargs):
        self.args = kwargs['args']
        self.config = kwargs['config']
        self.log = logging.getLogger(__name__)
        self.failures = []

    async def execute(self):
        """
        Take steps to accomplish requested action, returns the rendered report.
        """
        raise NotImplementedError

    async def gather_jobs(self, func, jobs, **kwargs):
        """
        Run func(*job, **kwargs) for every job on a worker pool.

        Every job runs to completion, then the first failure in job order is raised.

        Returns: Results in the order of jobs.
        """
        loop = asyncio.get_event_loop()
        with concurrent.futures.ThreadPoolExecutor(max_workers=hdl.util.thread_cap()) as pool:
            futs = [loop.run_in_executor(pool, functools.partial(func, *job, **kwargs))
                    for job in jobs]
            results = await asyncio.gather(*futs, return_exceptions=True)

        for result in results:
            if isinstance(result, BaseException):
                raise result

        return results

    def check(self, passed, equation, detail):
        """
        Record a failed assertion. The run goes on, emit raises with the first one recorded.
        """
        if not passed:
            msg = '{} failed: {}'.format(EQUATIONS[equation], detail)
            self.log.warning(msg)
            self.failures += [msg]

    def emit(self, records, footer=None):
        """
        Write the report to the configured path or stdout.
        Text reports get the footer appended.

        Raises:
            CheckFailed: After writing, when any check failed.
        """
        cfg = self.config
        text = hdlio.export.format_report(records, cfg.output_format)
        if footer and cfg.output_format == 'text':
            text += footer + '\n'

        if cfg.output_path:
            with hdlio.report_scope(cfg.output_path) as fout:
                fout.write(text)
            self.log.info("Report written to %s", cfg.output_path)
        else:
            print(text, end='')

        if self.failures:
            raise hdl.exc.CheckFailed(self.failures[0])

        return text


class Spectrum(Action):
    """
    Analytic level table.
    """
    async def execute(self):
        cfg = self.config
        records = []
        for num in range(cfg.n_max + 1):
            level = hdl.spectrumlab.solve_level(num, cfg.k, cfg.tol('root_tol'),
                                                polish=self.args.polish)
            scal = hdl.spectrumlab.higgs_scalars(level.E, cfg.k)
            nonrel = hdl.spectrumlab.nonrel_level(num, cfg.k) if self.args.nonrel else None
            self.check(abs(scal.gap(level.lam) - level.n) < GAP_TOL, 'gap',
                       'N={} gives {:.3e}'.format(num, scal.gap(level.lam)))
            records += [LevelRecord.from_level(level, scal, nonrel)]

        return self.emit(records)


class VerifySymbolic(Action):
    """
    Exact commutation conditions for the builtin generators or a custom candidate.
    """
    def candidates(self):
        """ Entries to verify, k substituted when requested. """
        if self.args.operator:
            blocks = dict(self.args.operator)
            if 'q12' not in blocks or 'q22' not in blocks:
                raise hdl.exc.InvalidCommandArgs(
                    "A custom candidate needs both --operator Q12=... and --operator Q22=...")
            entries = [hdl.generators.make_generator(self.args.name, blocks['q12'],
                                                     blocks['q22'], q11=blocks.get('q11'))]
        else:
            entries = list(hdl.generators.builtin_generators())

        if self.args.k_numeric is not None:
            entries = [entry.subs_k(self.args.k_numeric) for entry in entries]

        return entries

    def expected(self, report):
        """ Builtin verdict expectation, conserved ones pass and L fails. """
        return report.all_passed == (report.name in CONSERVED)

    async def execute(self):
        reports = []
        for entry in self.candidates():
            reports += [hdl.generators.verify_conditions(entry)]
            self.log.debug("%s Hermiticity: %s", entry.name,
                           hdl.generators.hermiticity_report(entry))

        verdicts = ', '.join(report.verdict() for report in reports)
        self.log.info(verdicts)
        records = []
        for report in reports:
            records += ConditionRecord.from_report(report.to_dict())

        if self.args.operator:
            return self.emit(records, footer=verdicts)

        wrong = [report for report in reports if not self.expected(report)]
        text = self.emit(records, footer=verdicts)
        if wrong:
            lines = ['Unexpected verdicts: ' + verdicts]
            for report in wrong:
                for label in hdl.generators.CONDITIONS:
                    lines += ['    {} ({}) residual: {}'.format(
                        report.name, label, hdl.symalg.format_expr(report.residuals[label]))]
            raise hdl.exc.SymbolicMismatch('\n'.join(lines))

        return text


class VerifyNumeric(Action):
    """
    Conservation table of the realized generators on one grid.
    """
    def dump(self, dirname, ham, ops, spaces):
        """ Export H, every T and the clustered levels under dirname. """
        os.makedirs(dirname, exist_ok=True)
        mats = {'H': ham.matrix}
        mats.update({name: op.matrix for name, op in ops.items()})
        hdlio.export.dump_matrices(dirname, mats)
        hdlio.export.write_eigen_report(os.path.join(dirname, 'eigen.json'), self.config.k,
                                        self.config.grid, spaces)

    async def execute(self):
        cfg = self.config
        spec, k = cfg.grid, cfg.k
        grid = hdl.converge.grid_levels(spec, k, levels=cfg.sweep_levels,
                                        cluster_tol=cfg.tol('cluster_tol'), **solver_options(cfg))
        prim, ham = grid.prim, grid.ham
        self.log.debug("Pinv2 rank %d of %d, defect %.3e", prim.retained_rank, spec.dim,
                       prim.pinv_defect())

        self.check(ham.hermitian_defect() <= cfg.tol('hermitian_tol'), 'hermitian',
                   'defect {:.3e}'.format(ham.hermitian_defect()))
        factor = prim.Bdag @ prim.B - prim.Psq
        factor = float(abs(factor).max() / max(abs(prim.Psq).max(), 1e-300))
        self.check(factor <= cfg.tol('hermitian_tol'), 'factor', 'defect {:.3e}'.format(factor))

        for num in range(cfg.sweep_levels):
            clusters = grid.levels.get(num, [])
            states = sum(space.multiplicity for space in clusters)
            self.check(len(clusters) == 1 and states == hdl.spectrumlab.degeneracy(num),
                       'degeneracy', 'N={} near E={:.6f} falls into {} clusters of {} '
                       'states'.format(num, grid.exact[num], len(clusters), states))

        defs = list(hdl.generators.builtin_generators())
        built = await self.gather_jobs(hdl.gridrep.build_T, [(entry, prim, k) for entry in defs])
        ops = {entry.name: top for entry, top in zip(defs, built)}
        residuals = await self.gather_jobs(hdl.gridrep.commutator_residual,
                                           [(top, ham, grid.spaces) for top in built])

        records = []
        for (name, top), res in zip(ops.items(), residuals):
            self.check(top.hermitian_defect() <= cfg.tol('hermitian_tol'), 'hermitian',
                       '{} defect {:.3e}'.format(name, top.hermitian_defect()))
            records += [ResidualRecord(generator=name, grid=spec.label(), k=k, full=res['full'],
                                       projected=res['projected'],
                                       hermitian_defect=top.hermitian_defect())]

        worst = max(rec.projected for rec in records if rec.generator in CONSERVED)
        control = [rec.projected for rec in records if rec.generator == 'L']
        if k > 0 and control and control[0] <= worst:
            self.log.warning("L residual %.3e not above the generators' %.3e on %s",
                             control[0], worst, spec.label())

        if self.args.dump_matrices:
            self.dump(self.args.dump_matrices, ham, ops, grid.spaces)

        return self.emit(records)


class Higgs(Action):
    """
    Higgs algebra residuals on the levels N1..N2 of one grid.
    """
    async def execute(self):
        cfg = self.config
        spec, k = cfg.grid, cfg.k
        low, high = cfg.levels
        grid = hdl.converge.grid_levels(spec, k, levels=high + 1,
                                        cluster_tol=cfg.tol('cluster_tol'), **solver_options(cfg))
        missing = [num for num in range(low, high + 1) if num not in grid.levels]
        if missing:
            raise hdl.exc.SpectralGapError("no cluster near levels {} on {}. Refine the grid or "
                                           "adjust the cluster tolerance.".format(
                                               missing, spec.label()))

        defs = hdl.generators.builtin_generators()
        t1, t2, t3 = (hdl.gridrep.build_T(defs[name], grid.prim, k) for name in HIGGS_TRIPLE)

        def level_report(num):
            level = hdl.spectrumlab.solve_level(num, k, cfg.tol('root_tol'))
            space = grid.merged(num)
            frame = hdl.higgscheck.build_frame(
                space, t1, t2, t3, level.E, k, N=num, leakage_tol=cfg.tol('leakage_tol'),
                window=hdl.higgscheck.resolved_window(grid.esys, space))
            return level, len(grid.levels[num]), space, hdl.higgscheck.frame_report(frame)

        results = await self.gather_jobs(level_report, [(num,) for num in range(low, high + 1)])

        records = []
        for level, clusters, space, report in results:
            self.check(clusters == 1 and space.multiplicity == level.d, 'degeneracy',
                       'N={} clustered {} states in {} clusters, expected {}'.format(
                           level.N, space.multiplicity, clusters, level.d))
            for name in ('ladder', 'cubic', 'casimir', 'weights'):
                res = report['residuals'][name]
                self.check(res <= cfg.tol(name), name, 'N={} residual {:.3e} above {:g}'.format(
                    level.N, res, cfg.tol(name)))
            records += [HiggsRecord.from_frame_report(report, spec.label())]

        return self.emit(records)


class Converge(Action):
    """
    Refinement studies over the sweep grids, repeated per swept coupling.
    """
    def study_records(self, study, rows, key, k, error='error'):
        """ ConvergenceRecords of rows with one fitted order per rows[key]. """
        summary = hdl.converge.summarize(rows, key, error, floor=self.config.tol('floor'))
        records = []
        for row in rows:
            records += [ConvergenceRecord(study=study, k=k, name=str(row[key]), grid=row['grid'],
                                          h=row['h'], error=row[error],
                                          order=summary[row[key]]['order'])]

        return records, summary

    def gather_rows(self, func, specs, k, **kwargs):
        """ Rows of func over all specs with the run's solver settings. """
        cfg = self.config
        return self.gather_jobs(func, [(spec, k) for spec in specs], levels=cfg.sweep_levels,
                                cluster_tol=cfg.tol('cluster_tol'), **solver_options(cfg),
                                **kwargs)

    async def level_study(self, specs, study, k):
        """ energy or nonrel study, every level against its analytic energy. """
        cfg = self.config
        grids = await self.gather_rows(hdl.converge.energy_rows, specs, k,
                                       nonrel=study == 'nonrel')
        rows = [row for grid in grids for row in grid]
        records, summary = self.study_records(study, rows, 'N', k)
        for num, result in summary.items():
            self.log.info("%s k=%g N=%d order %.2f", study, k, num, result['order'])
            self.check(result['decreasing'], 'energy', '{} k={:g} N={} errors {}'.format(
                study, k, num, result['errors']))
            self.check(hdl.converge.order_ok(result['order'], result['errors'], cfg.grid.backend,
                                             cfg.tol('floor')),
                       'order', '{} k={:g} N={} order {:.2f} on {} grids'.format(
                           study, k, num, result['order'], cfg.grid.backend))

        return records

    async def conservation_study(self, specs, k):
        """ Projected [T, H] of every generator, L as negative control. """
        grids = await self.gather_rows(hdl.converge.conservation_rows, specs, k)
        rows = [row for grid in grids for row in grid]
        records, summary = self.study_records('conservation', rows, 'generator', k, 'projected')
        for name in CONSERVED:
            self.check(summary[name]['decreasing'], 'conservation', 'k={:g} {} residuals {}'.format(
                k, name, summary[name]['errors']))

        if k > 0:
            errors = summary['L']['errors']
            self.check(hdl.converge.stays_within(errors, CONTROL_FACTOR), 'control',
                       'k={:g} L residuals {} leave a factor {:g} of {:.3e}'.format(
                           k, errors, CONTROL_FACTOR, errors[0]))

        return records

    async def higgs_study(self, specs, k):
        """ Ladder, cubic, Casimir and weight residuals per level under refinement. """
        grids = await self.gather_rows(hdl.converge.higgs_rows, specs, k)
        rows = [row for grid in grids for row in grid]
        records, summary = self.study_records('higgs', rows, 'name', k)
        for name, result in summary.items():
            if len(result['errors']) < len(specs):
                self.log.warning("higgs k=%g %s resolved on %d of %d grids", k, name,
                                 len(result['errors']), len(specs))
                continue
            self.check(result['decreasing'], 'higgs', 'k={:g} {} residuals {}'.format(
                k, name, result['errors']))

        return records

    async def canonical_study(self, specs):
        """ [x1, p1] defect on the central backend, the grid's own truncation order. """
        specs = [dataclasses.replace(spec, backend='central') for spec in specs]
        rows, order = hdl.converge.canonical_study(specs)
        self.log.info("canonical order %.2f", order)
        errors = [row['error'] for row in rows]
        self.check(hdl.converge.is_decreasing(errors, floor=self.config.tol('floor')),
                   'canonical', 'errors {}'.format(errors))

        return [ConvergenceRecord(study='canonical', name='x1p1', grid=row['grid'], h=row['h'],
                                  error=row['error'], order=order) for row in rows]

    async def execute(self):
        cfg = self.config
        studies = self.args.study or DEFAULT_STUDIES
        fixed = getattr(self.args, 'k', None) is not None
        ks = [cfg.k] if fixed or not cfg.sweep_ks else list(cfg.sweep_ks)
        specs = sorted((cfg.grid.refined(size) for size in cfg.sweep_grids),
                       key=lambda spec: spec.M1)

        records = []
        for k in ks:
            for study in STUDIES:
                if study not in studies or study == 'canonical':
                    continue
                if study in ('energy', 'nonrel'):
                    records += await self.level_study(specs, study, k)
                elif study == 'conservation':
                    records += await self.conservation_study(specs, k)
                else:
                    records += await self.higgs_study(specs, k)

        # The canonical relation does not involve k.
        if 'canonical' in studies:
            records += await self.canonical_study(specs)

        return self.emit(records)


class Limits(Action):
    """
    k -> 0 and nonrelativistic comparisons per level.
    """
    async def execute(self):
        cfg = self.config
        rows = hdl.spectrumlab.limit_rows(cfg.n_max, cfg.k, self.args.k_small, cfg.tol('root_tol'))
        for row in rows:
            self.check(abs(row['gap'] - row['N'] // 2) < GAP_TOL, 'gap', 'N={} gives {:.3e}'.format(
                row['N'], row['gap']))
            self.check(row['diff_k0'] < K0_TOL, 'k0', 'N={} differs by {:.3e}'.format(
                row['N'], row['diff_k0']))

        return self.emit([LimitRecord.from_row(row) for row in rows])
