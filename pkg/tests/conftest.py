import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from congkms.congruence import Modulus, SystemDescriptor  # noqa: E402
from congkms.field import Field  # noqa: E402
from congkms.ideals import Ideal  # noqa: E402

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def make_system(d, m0=1, m_inf=(), gamma=None, X=1000, label=""):
    """(K, m, Γ) from a squarefree d (None for ℚ) and an integer or element generators."""
    f = Field(d)
    gens = m0 if isinstance(m0, (list, tuple)) else [m0]
    gens = [f(*g) if isinstance(g, tuple) else f(g) for g in gens]
    return SystemDescriptor(f, Modulus(Ideal.from_generators(f, gens), tuple(m_inf)), gamma, X, label)


@pytest.fixture(scope="session")
def systems():
    """Systems shared across modules (their caches are reused)."""
    return {
        "Q_inf": make_system(None, 1, (0,)),
        "Q_5inf": make_system(None, 5, (0,), X=10000),
        "Q_5": make_system(None, 5),
        "Qi": make_system(-1),
        "Qi_3all": make_system(-1, 3, gamma="all"),
        "Qm5": make_system(-5),
        "Q10": make_system(10),
        "Q10_inf": make_system(10, 1, (0,)),
        "Q2": make_system(2),
        "Q3": make_system(3),
    }
