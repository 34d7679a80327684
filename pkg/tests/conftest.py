"""Shared fixtures: small meshes, the reference problem and an in-memory ledger."""

from contextlib import contextmanager
from pathlib import Path

import pytest
from sqlmodel import Session, SQLModel, create_engine

PROJECT_ROOT = Path(__file__).resolve().parent.parent
REFERENCE_CONFIG = PROJECT_ROOT / "configs" / "reference.conf"


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def db_session():
    """In-memory SQLite database with fresh tables for each test."""
    engine = create_engine("sqlite:///:memory:")
    SQLModel.metadata.create_all(engine)
    with Session(engine) as session:
        yield session


def mock_get_session(session):
    """Context-manager stand-in for get_session yielding the given session."""

    @contextmanager
    def _get_session():
        yield session

    return _get_session


@pytest.fixture
def mesh4():
    from trisolve.discretization import build_mesh

    return build_mesh(1, 4, 1.0)


@pytest.fixture
def mesh64():
    from trisolve.discretization import build_mesh

    return build_mesh(1, 64, 1.0)


@pytest.fixture
def reference_problem(mesh64):
    """-u'' = α·√λ + λ(u⁺ − (u⁺)³) with λ = 2λ₁ and α = 0."""
    from trisolve.discretization import first_eigenpair
    from trisolve.energy import make_problem
    from trisolve.nonlinearity import constant, gamma_corollary2, plus_power, scale_f_corollary2

    lam = 2.0 * first_eigenpair(mesh64).value
    h = constant(1.0)
    f = scale_f_corollary2(h, lam, gamma_corollary2(h))
    return make_problem(mesh64, f, plus_power(3), lam)


@pytest.fixture
def poisson_problem(mesh64):
    """λ = 0, f ≡ 1, α ≡ 1: the linear problem -u'' = 1."""
    from trisolve.energy import make_problem
    from trisolve.nonlinearity import constant, plus_power

    return make_problem(mesh64, constant(1.0), plus_power(3), 0.0, alpha=1.0)


def write_config(path: Path, **overrides) -> Path:
    """Reference configuration on a coarser mesh, with dotted-key overrides."""
    entries = {
        "domain.dim": "1",
        "domain.n": "64",
        "domain.lengths": "1.0",
        "nonlinearity.g.kind": "plus_power",
        "nonlinearity.g.q": "3",
        "nonlinearity.f.kind": "corollary2_scaled",
        "nonlinearity.f.h_kind": "one",
        "lambda.mode": "multiple_of_lambda1",
        "lambda.value": "2",
        "alpha.family": "constants",
        "output.dir": str(path.parent / "out"),
        "seed": "0",
    }
    entries.update({k.replace("__", "."): v for k, v in overrides.items()})
    path.write_text("\n".join(f"{k} = {v}" for k, v in entries.items()) + "\n", encoding="utf-8")
    return path
