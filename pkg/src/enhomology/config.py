"""
Tunable bounds and defaults.

Every bound has a DEFAULT_* constant; the basis bound can be overridden at
run time through the ENH_MAX_BASIS environment variable.
"""

from __future__ import annotations

import os

from .errors import SchemaError

# Largest per-degree basis the bar and twisted complexes may enumerate
DEFAULT_MAX_BASIS = 200_000
MAX_BASIS_ENV = "ENH_MAX_BASIS"

# Integer Smith normal form is only attempted below this many columns
DEFAULT_SNF_MAX_COLUMNS = 2000

# Dense oracle refuses degrees larger than this
DENSE_ORACLE_MAX_DIM = 500

# Truncation of the operadic lifting experiment
DEFAULT_OPERAD_BOUNDS = {
    'arity': 3,
    'degree': 3,
    'leaves': 3,
}

RETRACT_MAX_ARITY = 4
RETRACT_MAX_DEGREE = 3

# Accepted --ring spellings; "f:P" selects the prime field F_P
RING_PRESETS = {
    'q': 'rationals',
    'z': 'integers',
    'f': 'prime_field',
}
DEFAULT_RING = 'q'

# F_p uses machine-word residues
MAX_PRIME = 2**31

SCHEMA_VERSION = 1


def max_basis_size() -> int:
    """Current basis bound, honouring ENH_MAX_BASIS."""
    raw = os.environ.get(MAX_BASIS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_BASIS
    try:
        value = int(raw)
    except ValueError:
        raise SchemaError(f"{MAX_BASIS_ENV} must be a positive integer, got {raw!r}") from None
    if value <= 0:
        raise SchemaError(f"{MAX_BASIS_ENV} must be a positive integer, got {raw!r}")
    return value


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
