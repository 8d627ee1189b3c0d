"""Shared fixtures: closed-form models, parameter helpers and seeded random systems."""

from pathlib import Path
from typing import List, Tuple

import numpy as np
import pytest

from app.core.nevanlinna import (
    AcBoxTerm,
    AffineTerm,
    ConstantTerm,
    NevanlinnaModel,
    PoleTerm,
    SqrtTerm,
    direct_sum,
)
from app.scattering.dissipative_engine import DissipativeParameter
from app.scattering.selfadjoint_engine import SelfAdjointParameter

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

RANDOM_SEED = 2024
RANDOM_CASES = 20
RANDOM_GRID = np.linspace(-3.2, 3.2, 64)


def scalar(value) -> np.ndarray:
    return np.array([[value]], dtype=complex)


def scalar_model(term, name: str = "") -> NevanlinnaModel:
    return NevanlinnaModel(dim=1, terms=(term,), name=name)


def constant_model(value, name: str = "constant") -> NevanlinnaModel:
    return scalar_model(ConstantTerm(scalar(value)), name)


def sqrt_model() -> NevanlinnaModel:
    return scalar_model(SqrtTerm(scalar(1.0)), "halfline")


def affine_model() -> NevanlinnaModel:
    return scalar_model(AffineTerm(scalar(0.0), scalar(1.0)), "affine")


def pole_model(t: float = 0.0) -> NevanlinnaModel:
    return scalar_model(PoleTerm(t, scalar(1.0)), "pole")


def acbox_model() -> NevanlinnaModel:
    return scalar_model(AcBoxTerm(0.0, 1.0, scalar(1.0)), "ac-box")


def box_pole_model() -> NevanlinnaModel:
    """2×2 model with a.c. spectrum on (−1, 2), a pole at 3 and a dissipative constant."""
    coupling = 0.5 + 0.5j
    return NevanlinnaModel(
        dim=2,
        terms=(
            AcBoxTerm(-1.0, 2.0, np.array([[1.0, coupling], [np.conj(coupling), 1.0]])),
            PoleTerm(3.0, np.diag([1.0, 0.0])),
            ConstantTerm(np.diag([0.2 + 0.1j, -0.3 + 0.4j])),
        ),
        name="box-pole-2d",
    )


def theta(value) -> SelfAdjointParameter:
    return SelfAdjointParameter.full(np.atleast_2d(np.asarray(value, dtype=complex)))


# ══════════════════════════════════════════════════════════════
# SEEDED RANDOM SYSTEMS
# ══════════════════════════════════════════════════════════════

def random_psd(rng, dim: int, rank: int = None, scale: float = 1.0) -> np.ndarray:
    rank = dim if rank is None else rank
    factor = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return scale * factor @ factor.conj().T / max(rank, 1)


def random_hermitian(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (raw + raw.conj().T) / 2


def random_model(rng, dim: int = None) -> NevanlinnaModel:
    """PSD a.c. box, rank-one pole outside the test grid and a strictly dissipative constant."""
    dim = int(rng.integers(1, 4)) if dim is None else dim
    a = float(rng.uniform(-3.0, 0.0))
    b = a + float(rng.uniform(0.5, 3.0))
    pole_at = float(rng.uniform(3.5, 5.0)) * float(rng.choice([-1.0, 1.0]))
    constant = random_hermitian(rng, dim, 0.5) + 1j * (random_psd(rng, dim, scale=0.5) + 0.1 * np.eye(dim))
    return NevanlinnaModel(
        dim=dim,
        terms=(
            AcBoxTerm(a, b, random_psd(rng, dim)),
            PoleTerm(pole_at, random_psd(rng, dim, rank=1)),
            ConstantTerm(constant),
        ),
        name="random",
    )


def random_theta(rng, dim: int) -> SelfAdjointParameter:
    rank = int(rng.integers(0, dim + 1))
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    unitary, _ = np.linalg.qr(raw)
    return SelfAdjointParameter(dim, unitary[:, :rank], random_hermitian(rng, rank))


def random_dissipative(rng, dim: int) -> DissipativeParameter:
    rank = int(rng.integers(1, dim + 1))
    return DissipativeParameter.from_matrix(random_hermitian(rng, dim) - 1j * random_psd(rng, dim, rank=rank, scale=0.5))


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> str:
        return str(FIXTURE_DIR / name)
    return resolve


@pytest.fixture
def fixture_models() -> List[NevanlinnaModel]:
    return [
        constant_model(1j, "constant-i"),
        affine_model(),
        pole_model(),
        acbox_model(),
        sqrt_model(),
        box_pole_model(),
        direct_sum(sqrt_model(), constant_model(1j)),
        direct_sum(acbox_model(), pole_model(2.5)),
    ]


@pytest.fixture
def random_systems() -> List[Tuple[NevanlinnaModel, SelfAdjointParameter]]:
    rng = np.random.default_rng(RANDOM_SEED)
    systems = []
    for _ in range(RANDOM_CASES):
        model = random_model(rng)
        systems.append((model, random_theta(rng, model.dim)))
    return systems


@pytest.fixture
def random_dissipative_systems() -> List[Tuple[NevanlinnaModel, DissipativeParameter]]:
    rng = np.random.default_rng(RANDOM_SEED + 1)
    systems = []
    for _ in range(RANDOM_CASES):
        model = random_model(rng)
        systems.append((model, random_dissipative(rng, model.dim)))
    return systems


@pytest.fixture
def random_model_pairs() -> List[Tuple[NevanlinnaModel, NevanlinnaModel]]:
    rng = np.random.default_rng(RANDOM_SEED + 2)
    pairs = []
    for _ in range(RANDOM_CASES):
        dim = int(rng.integers(1, 4))
        pairs.append((random_model(rng, dim), random_model(rng, dim)))
    return pairs
