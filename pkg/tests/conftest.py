import numpy as np
import pytest

from gcasimir.graphene import GrapheneSheet
from gcasimir.materials import gold_drude, gold_plasma, silica
from gcasimir.reflection import BoundarySpec

RADIUS = 60350.0


@pytest.fixture(scope="session")
def au():
    return gold_drude()


@pytest.fixture(scope="session")
def au_plasma():
    return gold_plasma()


@pytest.fixture(scope="session")
def sio2():
    return silica()


@pytest.fixture(scope="session")
def real_sheet():
    """Sheet of the measured sample: gap 0.29 eV, chemical potential 0.24 eV."""
    return GrapheneSheet(0.29, 0.24)


@pytest.fixture(scope="session")
def coated_plate(sio2, real_sheet):
    return BoundarySpec.coated(sio2, real_sheet)


@pytest.fixture(scope="session")
def theory_tables(real_sheet):
    """Room-temperature and zero-temperature bands of the measured system, 240-720 nm."""
    from gcasimir.analysis import theory_table

    grid = np.arange(240.0, 721.0, 10.0)
    return (theory_table(grid, real_sheet, 294.0, radius=RADIUS, threads=1),
            theory_table(grid, real_sheet, 0.0, radius=RADIUS, threads=1))
