"""
Validation utilities
Process-spec validation and spec-file loading
"""

import os
import re
from typing import Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

import config
from config import logger
from errors import SpecParseError
from models.process import KINDS, Ball, ProcessSpec

# Required and optional parameter names per kind
REQUIRED_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    'stable': ('alpha',),
    'relativistic': ('m',),
    'geometric_stable': ('beta',),
    'conjugate_vg': (),
    'truncated_stable': ('alpha',),
    'counterexample': ('alpha', 'gamma'),
}
OPTIONAL_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    'counterexample': ('beta',),
}


def is_valid_kind(kind: str) -> Tuple[bool, str]:
    """
    Validate a process kind

    Args:
        kind: Kind name from a spec file

    Returns:
        Tuple of (is_valid, error_message)
    """
    if kind not in KINDS:
        return False, f"kind: unknown kind '{kind}' (expected one of {', '.join(KINDS)})"
    return True, ""


def validate_counterexample_triple(alpha: float, gamma: float, beta: Optional[float]) -> Tuple[bool, str]:
    """
    Check α∈(0,1/2), γ∈(1/2,1), α+γ<1 and, when β is given, β∈(0,1), α−β+γ<0

    Returns:
        Tuple of (is_valid, error_message listing every violated inequality)
    """
    violated: List[str] = []
    if not 0 < alpha < 0.5:
        violated.append(f"0 < alpha < 1/2 (alpha={alpha:g})")
    if not 0.5 < gamma < 1:
        violated.append(f"1/2 < gamma < 1 (gamma={gamma:g})")
    if not alpha + gamma < 1:
        violated.append(f"alpha + gamma < 1 (sum={alpha + gamma:g})")
    if beta is not None:
        if not 0 < beta < 1:
            violated.append(f"0 < beta < 1 (beta={beta:g})")
        if not alpha - beta + gamma < 0:
            violated.append(f"alpha - beta + gamma < 0 (value={alpha - beta + gamma:g})")
    if violated:
        return False, "; ".join(violated)
    return True, ""


def validate_parameters(kind: str, dimension: int, params: Dict[str, float]) -> Tuple[bool, str]:
    """
    Validate the parameter block of a spec

    Args:
        kind: Process kind
        dimension: Ambient dimension
        params: Parameter mapping

    Returns:
        Tuple of (is_valid, error_message); the message starts with the offending key
    """
    valid, message = is_valid_kind(kind)
    if not valid:
        return valid, message

    allowed = REQUIRED_PARAMETERS[kind] + OPTIONAL_PARAMETERS.get(kind, ())
    for name in REQUIRED_PARAMETERS[kind]:
        if name not in params:
            return False, f"parameters.{name}: required for kind '{kind}'"
    for name, value in params.items():
        if name not in allowed:
            return False, f"parameters.{name}: unknown parameter for kind '{kind}'"
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value):
            return False, f"parameters.{name}: must be a finite number"

    if kind in ('stable', 'truncated_stable'):
        alpha = params['alpha']
        if not 0 < alpha < 2:
            return False, f"parameters.alpha: must lie in (0, 2), got {alpha:g}"
    elif kind == 'relativistic':
        if params['m'] < 0:
            return False, f"parameters.m: must be >= 0, got {params['m']:g}"
    elif kind == 'geometric_stable':
        beta = params['beta']
        if not 0 < beta <= 2:
            return False, f"parameters.beta: must lie in (0, 2], got {beta:g}"
    elif kind == 'counterexample':
        if dimension != 1:
            return False, "dimension: the counterexample process lives in dimension 1"
        valid, message = validate_counterexample_triple(params['alpha'], params['gamma'], None)
        if not valid:
            return False, f"parameters.alpha: {message}"
        valid, message = validate_counterexample_triple(params['alpha'], params['gamma'], params.get('beta'))
        if not valid:
            return False, f"parameters.beta: {message}"
    return True, ""


def validate_spec_dict(data: dict) -> Tuple[bool, str]:
    """
    Validate a parsed spec file (key-value tree)

    Returns:
        Tuple of (is_valid, error_message)
    """
    if 'kind' not in data:
        return False, "kind: missing"
    if 'dimension' not in data:
        return False, "dimension: missing"
    dimension = data['dimension']
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        return False, f"dimension: must be an integer >= 1, got {dimension!r}"

    params = data.get('parameters', {}) or {}
    if not isinstance(params, dict):
        return False, "parameters: must be a table"
    valid, message = validate_parameters(data['kind'], dimension, params)
    if not valid:
        return valid, message

    grid = data.get('grid', {}) or {}
    r_min = grid.get('r_min', config.GRID_R_MIN)
    r_max = grid.get('r_max', config.GRID_R_MAX)
    points = grid.get('points', config.GRID_POINTS)
    if not r_min > 0:
        return False, f"grid.r_min: must be > 0, got {r_min!r}"
    if not r_max > r_min:
        return False, "grid.r_max: must exceed r_min"
    if not isinstance(points, int) or points < config.MIN_PROFILE_POINTS:
        return False, f"grid.points: must be an integer >= {config.MIN_PROFILE_POINTS}"

    flags = data.get('flags', {}) or {}
    for name, value in flags.items():
        if name not in ('unimodal', 'transient'):
            return False, f"flags.{name}: unknown flag"
        if not isinstance(value, bool):
            return False, f"flags.{name}: must be true or false"
    return True, ""


def validate_point_in_ball(ball: Ball, x0) -> Tuple[bool, str]:
    """Starting point must lie in the closure of the ball and match its dimension"""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.size != ball.dimension:
        return False, f"x0 has dimension {x0.size}, ball has dimension {ball.dimension}"
    if ball.distance_to_boundary(x0) < 0:
        return False, f"x0={tuple(x0)} lies outside {ball}"
    return True, ""


def validate_positive(name: str, value: float) -> Tuple[bool, str]:
    if value is None or not np.isfinite(value) or value <= 0:
        return False, f"{name} must be a positive number, got {value!r}"
    return True, ""


# ================================================
# SPEC FILES
# ================================================

def _key_location(text: str, key_path: str) -> Tuple[Optional[int], Optional[int]]:
    """Line/column (1-based) of a dotted key inside TOML text"""
    parts = key_path.split('.')
    leaf = parts[-1]
    table = parts[0] if len(parts) > 1 else None
    in_table = table is None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.match(r'^\[([^\]]+)\]', stripped)
        if header:
            in_table = table is not None and header.group(1).strip() == table
            if table is None:
                in_table = False
            continue
        match = re.match(rf'^(\s*){re.escape(leaf)}\s*=', line)
        if match and in_table:
            return number, len(match.group(1)) + 1
    return None, None


def parse_spec_text(text: str, path: Optional[str] = None, default_id: str = '') -> ProcessSpec:
    """
    Parse and validate spec-file text

    Raises:
        SpecParseError: with line and column of the problem
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        found = re.search(r'line (\d+), column (\d+)', str(e))
        line = int(found.group(1)) if found else getattr(e, 'lineno', None)
        column = int(found.group(2)) if found else getattr(e, 'colno', None)
        raise SpecParseError(str(e), line=line, column=column, path=path) from e

    valid, message = validate_spec_dict(data)
    if not valid:
        key_path = message.split(':', 1)[0]
        line, column = _key_location(text, key_path)
        raise SpecParseError(message, line=line, column=column, path=path)

    data.setdefault('id', default_id)
    return ProcessSpec.from_dict(data)


def load_spec_file(path: str) -> ProcessSpec:
    """
    Load a process spec from a TOML file

    Args:
        path: Spec file path

    Returns:
        Validated ProcessSpec (id defaults to the file stem)
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise SpecParseError(f"cannot read spec file: {e}", path=path) from e
    stem = os.path.splitext(os.path.basename(path))[0]
    spec = parse_spec_text(text, path=path, default_id=stem)
    logger.debug(f"Loaded spec {spec} from {path}")
    return spec


def list_spec_files(directory: str = config.SPECS_DIR) -> List[str]:
    """Shipped spec files, sorted by name"""
    if not os.path.isdir(directory):
        return []
    return sorted(os.path.join(directory, name) for name in os.listdir(directory) if name.endswith('.toml'))


def resolve_spec(name_or_path: str, directory: str = config.SPECS_DIR) -> ProcessSpec:
    """Load a spec given a path or the id of a shipped spec"""
    if os.path.isfile(name_or_path):
        return load_spec_file(name_or_path)
    candidate = os.path.join(directory, f"{name_or_path}.toml")
    if os.path.isfile(candidate):
        return load_spec_file(candidate)
    raise SpecParseError(f"no spec file or shipped spec named '{name_or_path}'", path=name_or_path)
