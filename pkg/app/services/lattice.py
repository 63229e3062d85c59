"""
Lattice operations on lead functions.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from app.exceptions import ConfigurationError
from app.models.lattice import Extended, GridConfig, LeadFunction


def require_same_grid(*functions: LeadFunction) -> GridConfig:
    grid = functions[0].grid
    for other in functions[1:]:
        if other.grid != grid:
            raise ConfigurationError(f"Grid mismatch: {grid} vs {other.grid}")
    return grid


def add_codes(a: np.ndarray, b: np.ndarray, grid: GridConfig) -> np.ndarray:
    """Saturating sum of two code arrays; exact top absorbs."""
    total = np.minimum(a, grid.inf_code) + np.minimum(b, grid.inf_code)
    total = np.where(total > grid.cap_units, grid.inf_code, total)
    return np.where((a == grid.top_code) | (b == grid.top_code), grid.top_code, total)


def lattice_leq(alpha: LeadFunction, beta: LeadFunction) -> bool:
    require_same_grid(alpha, beta)
    return bool(np.all(alpha.normalized() <= beta.normalized()))


def lattice_add(alpha: LeadFunction, beta: LeadFunction) -> LeadFunction:
    grid = require_same_grid(alpha, beta)
    return LeadFunction(grid, add_codes(alpha.codes, beta.codes, grid))


def lattice_max(alpha: LeadFunction, beta: LeadFunction) -> LeadFunction:
    grid = require_same_grid(alpha, beta)
    return LeadFunction(grid, np.maximum(alpha.codes, beta.codes))


def lattice_min(alpha: LeadFunction, beta: LeadFunction) -> LeadFunction:
    grid = require_same_grid(alpha, beta)
    return LeadFunction(grid, np.minimum(alpha.codes, beta.codes))


def eval_zero(alpha: LeadFunction) -> Extended:
    """The maximum-lead distance assuming the lead is zero."""
    return alpha.grid.decode(int(alpha.codes[alpha.grid.half_width]))


def sup_distance(alpha: LeadFunction, beta: LeadFunction) -> Extended:
    grid = require_same_grid(alpha, beta)
    a, b = alpha.normalized(), beta.normalized()
    a_inf, b_inf = a == grid.inf_code, b == grid.inf_code
    if np.any(a_inf != b_inf):
        return math.inf
    finite = ~a_inf
    if not finite.any():
        return Fraction(0)
    return int(np.abs(a[finite] - b[finite]).max()) * grid.step


def p_bound(alpha: LeadFunction, alpha_prime: LeadFunction) -> LeadFunction:
    """Distance bound for label composition."""
    return lattice_max(alpha, alpha_prime)


def c_relaxed(beta: LeadFunction, gamma: LeadFunction,
              alpha: LeadFunction, alpha_prime: LeadFunction) -> LeadFunction:
    """Relaxed distance bound for label conjunction after widening by beta and gamma."""
    return lattice_add(lattice_max(alpha, alpha_prime), lattice_max(beta, gamma))
