import dataclasses
from unittest.mock import patch

import pytest

from tra_solver.errors import ConfigError, ConvergenceError
from tra_solver.potentials import PotentialSpec
from tra_solver.solver import ProblemKind, SolveConfig
from tra_solver.verify import (
    SUITES,
    CheckResult,
    SuiteReport,
    default_problems,
    reconcile_oscillator_energy_scale,
    resolve_suite_names,
    run_suite,
    run_verification
)


class TestSuiteReport:
    def test_should_serialize_checks(self):
        report = SuiteReport('tridiagonality', [CheckResult('a', True, 'defect 0')])
        assert report.to_dict() == {
            'suite': 'tridiagonality',
            'checks': [{'name': 'a', 'passed': True, 'detail': 'defect 0'}],
            'passed': True
        }

    def test_should_fail_when_any_check_fails(self):
        report = SuiteReport('x', [CheckResult('a', True, ''), CheckResult('b', False, '')])
        assert not report.passed


class TestResolveSuiteNames:
    def test_should_expand_all(self):
        assert resolve_suite_names('all') == list(SUITES)

    def test_should_reject_unknown_suite(self):
        with pytest.raises(ConfigError):
            resolve_suite_names('unknown')


class TestSuites:
    def test_should_pass_tridiagonality(
        self, oscillator_config: SolveConfig, reference_config: SolveConfig
    ):
        report = run_verification(
            'tridiagonality', [oscillator_config, reference_config]
        )
        assert report.passed, report.to_dict()
        assert len(report.checks) == 3

    def test_should_pass_orthonormality(
        self, oscillator_config: SolveConfig, reference_config: SolveConfig
    ):
        report = run_verification(
            'orthonormality', [oscillator_config, reference_config]
        )
        assert report.passed, report.to_dict()

    def test_should_pass_consistency_reduction(self, reference_config: SolveConfig):
        report = run_verification('consistency-reduction', [reference_config])
        assert report.passed, report.to_dict()

    def test_should_pass_factor_reconciliation(self, oscillator_config: SolveConfig):
        report = run_verification('factor-reconciliation', [oscillator_config])
        assert report.passed, report.to_dict()

    @pytest.mark.parametrize('angular_momentum', [0, 1, 2])
    def test_should_pass_oscillator_oracle_comparison(
        self, oscillator_config: SolveConfig, angular_momentum: int
    ):
        cfg = dataclasses.replace(oscillator_config, angular_momentum=angular_momentum)
        report = run_verification('oracle-comparison', [cfg])
        assert report.passed, report.to_dict()
        if angular_momentum:
            assert all(f'l={angular_momentum}' in check.name for check in report.checks)

    def test_should_compare_every_solver_mode_with_finite_differences(self):
        cfg = SolveConfig(
            potential=PotentialSpec.three_parameter_dimensionless(-15.0, 0.0, 1.0, 1.0),
            sweep_sizes=()
        )
        report = run_verification('oracle-comparison', [cfg])
        energy_checks = [
            check for check in report.checks
            if check.name.startswith('bound-state energies match finite differences')
        ]
        assert len(energy_checks) == 1, report.to_dict()
        for mode in ('self-consistent', 'fixed-basis', 'paper-literal'):
            assert f'{mode}: ' in energy_checks[0].detail

    def test_should_prefix_check_names_for_all_suites(self, oscillator_config: SolveConfig):
        report = run_verification('all', [oscillator_config])
        assert report.suite == 'all'
        assert all(': ' in check.name for check in report.checks)
        assert {check.name.split(': ')[0] for check in report.checks} <= set(SUITES)

    def test_should_record_failing_problem(self, oscillator_config: SolveConfig):
        def _raise(_cfg):
            raise ConvergenceError('no convergence')

        with patch.dict(SUITES, {'orthonormality': _raise}):
            report = run_suite('orthonormality', [oscillator_config])
        assert not report.passed
        assert 'no convergence' in report.checks[0].detail


class TestDefaultProblems:
    def test_should_cover_oscillator_angular_momenta(self):
        problems = default_problems()
        assert [
            cfg.angular_momentum for cfg in problems if cfg.problem == ProblemKind.OSCILLATOR
        ] == [0, 1, 2]
        assert sum(cfg.problem == ProblemKind.THREE_PARAMETER for cfg in problems) == 3


class TestReconcileOscillatorEnergyScale:
    def test_should_single_out_one_candidate(self):
        matches = reconcile_oscillator_energy_scale()
        consistent = [name for name, flags in matches.items() if all(flags)]
        assert consistent == ['lambda/sqrt(2)']
