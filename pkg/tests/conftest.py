"""Shared fixtures: the default (2, 1) basis and a small band table."""

import pytest

from x1jacobi.analysis.recurrence import build_table
from x1jacobi.polynomials.exceptional import ExceptionalBasis, build_basis
from x1jacobi.polynomials.jacobi import JacobiParams

# Rows covered by the shared table: enough for N = 20 with l <= 4 and the N = 10 path oracle.
TABLE_ROWS = 40


@pytest.fixture(scope="session")
def basis() -> ExceptionalBasis:
    return build_basis(JacobiParams(2.0, 1.0))


@pytest.fixture(scope="session")
def mirrored_basis() -> ExceptionalBasis:
    return build_basis(JacobiParams(1.0, 2.0))


@pytest.fixture(scope="session")
def table(basis):
    return build_table(basis, TABLE_ROWS)


@pytest.fixture
def output_dir(tmp_path):
    return tmp_path / "results"
