"""
CLI commands
density, check, simulate and specs; each writes its outputs and a manifest
"""

import os
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

import config
from config import logger
from errors import PreconditionError, UsageError
from models.manifest import RunManifest
from models.process import Ball, ProcessSpec
from models.reports import BoundReport
from models.samples import PathConfig
from modules import difference, estimates, levy_measures, sampling, symbols, transforms
from services import stable_ball
from services.persistence import OutputWriter, render_table
from utils.validators import (list_spec_files, load_spec_file, resolve_spec, validate_point_in_ball,
                              validate_positive)

SUITES = ('symbols', 'levy', 'kernels', 'difference', 'bounds', 'counterexample')

# Shipped spec each suite runs on when --spec is not given
DEFAULT_SUITE_SPECS = {
    'symbols': 'stable_a1_d1',
    'levy': 'stable_a1_d1',
    'kernels': 'cauchy',
    'difference': 'cauchy',
    'bounds': 'stable_a1_d1',
    'counterexample': 'counterexample',
}


@dataclass
class CheckItem:
    """One check inside a suite; gating items decide the exit code"""

    name: str
    report: object
    gating: bool = True
    expect_pass: bool = True

    @property
    def ok(self) -> bool:
        return bool(self.report.passed) == self.expect_pass

    def to_dict(self) -> dict:
        payload = self.report.to_dict() if hasattr(self.report, 'to_dict') else dict(self.report)
        return {'name': self.name, 'gating': self.gating, 'expect_pass': self.expect_pass,
                'ok': self.ok, 'report': payload}


class _Summary(dict):
    """Dict-shaped report (assumption classification) with a pass flag"""

    @property
    def passed(self) -> bool:
        return bool(self.get('A'))

    def to_dict(self) -> dict:
        return dict(self)


def _manifest(command: str, spec: Optional[ProcessSpec], parameters: dict, seed: Optional[int]) -> RunManifest:
    return RunManifest(command=command, spec_id=spec.label if spec else '', parameters=parameters, seed=seed)


def _finish(writer: OutputWriter, status: str) -> None:
    writer.manifest.finish(status)
    writer.write_manifest()


# ================================================
# DENSITY
# ================================================

def cmd_density(spec: ProcessSpec, t: float, d: Optional[int], out: str, walk: bool = False) -> List[str]:
    """
    Tabulate p_t in dimension d to CSV + JSON sidecar

    The CSV starts with an r = 0 row holding p_t(0) when it is finite.
    """
    if t <= 0:
        raise UsageError(f"--t must be positive, got {t}")
    d = spec.dimension if d is None else d
    if d < 1:
        raise UsageError(f"--d must be >= 1, got {d}")
    manifest = _manifest('density', spec, {'spec': spec.to_dict(), 't': t, 'd': d, 'walk': walk}, None)
    writer = OutputWriter(out, manifest)
    profile = transforms.transition_density(spec, t, d)
    if walk:
        profile = transforms.dimension_walk(profile)
    stem = f"density_{spec.label}_t{t:g}_d{profile.d}"
    rows = list(zip(profile.grid, profile.values))
    origin = profile.meta.get('origin_value')
    if origin is not None and np.isfinite(origin) and not walk:
        rows.insert(0, (0.0, origin))
    paths = [writer.write_csv(f"{stem}.csv", ['r', 'value'], rows),
             writer.write_json(f"{stem}.json", profile.sidecar())]
    _finish(writer, 'ok')
    logger.info(f"density: {profile} -> {paths[0]}")
    return paths


# ================================================
# CHECK SUITES
# ================================================

def _suite_symbols(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    items = []
    alpha = spec.stability_index
    tolerance = config.SCALING_TOLERANCE if tol is None else tol
    if alpha is not None:
        items.append(CheckItem('wlsc', symbols.check_wlsc(spec, alpha, tolerance=tolerance)))
        items.append(CheckItem('wusc', symbols.check_wusc(spec, alpha, tolerance=tolerance)))
    if spec.is_subordinate:
        items.append(CheckItem('h10_bernstein', symbols.check_H10_bernstein(spec)))
    u = np.geomspace(1e-2, 1e2, 9)
    inverse = symbols.psi_inverse(spec, u)
    star = symbols.psi_star(spec, inverse)
    round_trip = BoundReport(name='psi_inverse', points=[{'u': float(v)} for v in u],
                             lhs=np.abs(star - u), rhs=1e-4 * u, fit_mode='fixed_constant',
                             tolerance=0.0, spec_id=spec.label)
    items.append(CheckItem('psi_inverse', round_trip))
    return items


def _suite_levy(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    # the counterexample measure breaks monotonicity of -ν'(r)/r at r = 1
    regular = spec.kind != 'counterexample'
    monotone, shift, doubling = levy_measures.check_H1(spec)
    items = [CheckItem("h1_monotone", monotone, expect_pass=regular),
             CheckItem("h1_shift", shift, gating=regular),
             CheckItem("h1_doubling", doubling, gating=regular)]
    items.append(CheckItem('levy_upper', levy_measures.levy_upper_bound_report(spec), gating=regular))
    items.append(CheckItem('levy_limits', levy_measures.levy_limit_report(spec), gating=regular))
    if regular:
        a1 = levy_measures.h1_constant([shift, doubling])
        items.append(CheckItem('levy_quotient', levy_measures.levy_quotient_bounds(spec, a1)))
        d = spec.dimension
        pairs = [(tuple([v1] + [0.0] * (d - 1)), tuple([z1] + [0.3] * (d - 1)))
                 for v1 in (0.2, 1.0, 3.0) for z1 in (0.1, 0.5, 2.0)]
        items.append(CheckItem('tilde_nu_bound', levy_measures.check_tilde_nu_bound(spec, a1, pairs)))
        items.append(CheckItem('assumptions', _Summary(levy_measures.classify_assumptions(spec))))
    return items


def _suite_kernels(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    items = [CheckItem('dimension_walk', transforms.dimension_walk_report(spec, 1.0, tolerance=tol))]
    if spec.dimension == 1:
        items.append(CheckItem('semigroup', transforms.semigroup_check(spec)))
    items.append(CheckItem('density_upper', estimates.density_bounds(
        spec, np.geomspace(1e-2, 1e2, 9), np.geomspace(1e-2, 1e2, 41))))
    return items


def _suite_difference(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    d = spec.dimension
    items = []
    if d == 1:
        pairs = [(x, z) for x in (0.1, 0.5, 2.0) for z in (0.2, 1.0, 3.0)]
        items.append(CheckItem('chapman', difference.chapman_report(spec, 0.5, 0.5, pairs)))
    ball = Ball.centered(d, 1.0)
    far = (tuple([2.0] + [-0.5] * (d - 1)), tuple([3.0] + [0.5] * (d - 1)))
    origin = tuple([0.0] * d)
    upper, lower = sampling.check_exit_sandwich(spec, cfg=cfg)
    items += [CheckItem('exit_upper', upper), CheckItem('exit_lower', lower)]
    items.append(CheckItem('ikeda_watanabe', sampling.ikeda_watanabe_check(spec, ball, far[0], far[1], origin, cfg)))
    near = (tuple([1.5] + [-0.5] * (d - 1)), tuple([2.5] + [0.5] * (d - 1)))
    x = tuple([0.3] + [0.0] * (d - 1))
    items.append(CheckItem('domination', difference.check_domination(spec, 1.0, [near, far], x, cfg)))
    if d <= 2:
        items.append(CheckItem('green_integral', difference.check_green_integral(spec, cfg=cfg)))
    items.append(CheckItem('ubhp', sampling.check_ubhp(spec, cfg=cfg)))
    if spec.stability_index is not None:
        items.append(CheckItem('ring', difference.check_ring(spec, cfg=cfg)))
        potential_form, scale_form = difference.check_green_hat_bound(spec)
        items += [CheckItem('green_hat_potential', potential_form), CheckItem('green_hat_scale', scale_form)]
        items.append(CheckItem('tilde_green', difference.check_tilde_green_bound(spec)))
    return items


def _suite_bounds(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    d = spec.dimension
    items = []

    def grad_pt(points: int):
        grid = np.geomspace(1e-2, 1e2, points)
        return estimates.check_grad_pt(spec, grid, grid)

    for report in estimates.refinement_stability(grad_pt, 100):
        if report is not None:
            items.append(CheckItem(report.name, report))

    items.append(CheckItem('density_upper', estimates.density_bounds(
        spec, np.geomspace(1e-2, 1e2, 9), np.geomspace(1e-2, 1e2, 41))))

    ball = Ball.centered(d, 1.0)
    box = (tuple([1.2] + [-0.5] * (d - 1)), tuple([2.0] + [0.5] * (d - 1)))
    harmonic = estimates.check_harmonic_gradient(spec, ball, box, cfg=cfg)
    items.append(CheckItem('harmonic_gradient', harmonic))

    if d == 1 and spec.stability_index is not None:
        items.append(CheckItem('green_gradient', estimates.check_green_gradient(spec)))
    reflection_box = (tuple([2.0] + [-0.5] * (d - 1)), tuple([3.0] + [0.5] * (d - 1)))
    items.append(CheckItem('lipschitz_reflection',
                           estimates.check_lipschitz_reflection(spec, boundary=reflection_box, cfg=cfg)))
    return items


def _suite_counterexample(spec: ProcessSpec, cfg: PathConfig, tol: Optional[float]) -> List[CheckItem]:
    kwargs = {'alpha': spec.param('alpha', 0.3), 'gamma': spec.param('gamma', 0.6),
              'beta': spec.param('beta', 0.95)}
    if tol is not None:
        kwargs['tolerance'] = tol
    return [CheckItem('counterexample', estimates.run_counterexample(**kwargs))]


SUITE_RUNNERS: Dict[str, Callable[[ProcessSpec, PathConfig, Optional[float]], List[CheckItem]]] = {
    'symbols': _suite_symbols,
    'levy': _suite_levy,
    'kernels': _suite_kernels,
    'difference': _suite_difference,
    'bounds': _suite_bounds,
    'counterexample': _suite_counterexample,
}


def cmd_check(suite: str, spec: Optional[ProcessSpec], out: str, cfg: PathConfig = PathConfig(),
              tol: Optional[float] = None) -> int:
    """
    Run a check suite; 0 when every gating check passes, 1 otherwise

    Writes check_<suite>.json (report tree) and check_<suite>.txt (summary table);
    the counterexample suite adds its scaling data as CSV.
    """
    if suite not in SUITE_RUNNERS:
        raise UsageError(f"unknown suite '{suite}', choose from {', '.join(SUITES)}")
    spec = spec if spec is not None else resolve_spec(DEFAULT_SUITE_SPECS[suite])
    manifest = _manifest('check', spec, {'suite': suite, 'spec': spec.to_dict(), 'tol': tol,
                                         'paths': cfg.to_dict()}, cfg.seed)
    writer = OutputWriter(out, manifest)

    items = SUITE_RUNNERS[suite](spec, cfg, tol)
    failing = [item for item in items if item.gating and not item.ok]
    status = 'pass' if not failing else 'fail'
    writer.write_json(f"check_{suite}.json", {
        'suite': suite, 'spec_id': spec.label, 'status': status,
        'first_failure': failing[0].name if failing else None,
        'checks': [item.to_dict() for item in items],
    })
    rows = [(item.name, 'gating' if item.gating else 'info', 'PASS' if item.report.passed else 'FAIL',
             'yes' if item.expect_pass else 'no', 'ok' if item.ok else 'FAILED') for item in items]
    writer.write_text(f"check_{suite}.txt",
                      render_table(('check', 'role', 'result', 'expected_pass', 'status'), rows))
    if suite == "counterexample":
        writer.write_csv("counterexample_scaling.csv", ["series", "abscissa", "difference"], items[0].report.rows())
    _finish(writer, status)

    if failing:
        logger.error(f"check {suite}: first failing check '{failing[0].name}' ({failing[0].report})")
        return 1
    logger.info(f"check {suite}: {len(items)} checks passed on {spec.label}")
    return 0


# ================================================
# SIMULATE
# ================================================

def cmd_simulate(spec: ProcessSpec, radius: float, x0: Sequence[float], cfg: PathConfig, out: str,
                 samples_csv: bool = False) -> Dict[str, object]:
    """
    Exit of B(0, radius) from x0: summary JSON, optionally every exit event as CSV

    Stable specs also report the closed-form mean exit time.
    """
    valid, error = validate_positive("--radius", radius)
    if not valid:
        raise UsageError(error)
    x0 = tuple(float(v) for v in x0) if x0 else tuple([0.0] * spec.dimension)
    if len(x0) != spec.dimension:
        raise UsageError(f"--x0 needs {spec.dimension} coordinates, got {len(x0)}")
    ball = Ball.centered(spec.dimension, radius)
    valid, error = validate_point_in_ball(ball, x0)
    if not valid:
        raise PreconditionError(error, {'x0': list(x0), 'radius': radius})

    manifest = _manifest('simulate', spec, {'spec': spec.to_dict(), 'radius': radius, 'x0': list(x0),
                                            'paths': cfg.to_dict(), 'samples_csv': samples_csv}, cfg.seed)
    writer = OutputWriter(out, manifest)
    samples = sampling.sample_exit(spec, ball, x0, cfg)
    tau = samples.tau[samples.exited]
    summary: Dict[str, object] = {
        'spec_id': spec.label, 'radius': radius, 'x0': list(x0), 'n': len(samples),
        'censored_fraction': samples.censored_fraction,
        'mean_tau': float(tau.mean()) if tau.size else None,
        'stderr_tau': float(tau.std(ddof=1) / np.sqrt(tau.size)) if tau.size > 1 else None,
        'mean_overshoot': float(samples.overshoot[samples.exited].mean()) if tau.size else None,
    }
    if spec.stability_index is not None:
        summary['closed_form_tau'] = stable_ball.exit_time_mean(spec.stability_index, spec.dimension,
                                                                radius, np.asarray(x0))
        if spec.dimension == 1 and tau.size:
            summary['exit_position_chi2'] = sampling.exit_position_chi2(spec, ball, x0, samples)
    if samples_csv:
        header = ['tau'] + [f"x{i + 1}" for i in range(spec.dimension)]
        writer.write_csv(f"exit_{spec.label}.csv", header, samples.rows())
    writer.write_json(f"simulate_{spec.label}.json", summary)
    _finish(writer, 'ok')
    logger.info(f"simulate: mean τ {summary['mean_tau']} over {len(samples)} paths")
    return summary


# ================================================
# SPECS
# ================================================

def cmd_specs(directory: str = config.SPECS_DIR) -> str:
    """Table of shipped specs"""
    rows = []
    for path in list_spec_files(directory):
        spec = load_spec_file(path)
        params = ", ".join(f"{k}={v:g}" for k, v in spec.parameters)
        rows.append((spec.label, spec.kind, spec.dimension, params, os.path.basename(path)))
    return render_table(('id', 'kind', 'd', 'parameters', 'file'), rows)

