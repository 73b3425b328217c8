##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Provides pytest fixtures shared by the test modules.                                           #
# - anyio_backend : forces asyncio backend for pytest-anyio.                                     #
# - test_client   : Async HTTPX client bound to the ASGI app using ASGITransport.                #
# - kzh_*         : session-scoped two-sided discontinuous function, its complex, its covering   #
#                   protocols and its microperiodic certificate (expensive to build).            #
# - *_file        : the same objects written as function / perturbation files.                   #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from collections.abc import AsyncGenerator

import httpx
import pytest
from httpx import AsyncClient

from app import app
from src import compendium
from src.complexes import DeltaComplex
from src.covering import generate_covered_components
from utils.file_io import save_function_file, save_perturbation_file

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


@pytest.fixture
def anyio_backend() -> str:
    """
    Force pytest-anyio to use the asyncio backend.
    This avoids backend conflicts when running async tests.
    """
    return "asyncio"


@pytest.fixture
async def test_client() -> AsyncGenerator[AsyncClient, None]:
    """
    Provides an HTTPX AsyncClient bound to the FastAPI ASGI app.
    Allows sending HTTP requests to the app during tests.
    """
    async with httpx.AsyncClient(transport=httpx.ASGITransport(app=app), base_url="http://test") as client:
        # Yield ensures proper cleanup of the async context after each test
        yield client


@pytest.fixture(scope="session")
def kzh():
    """The 40-breakpoint function over Q(sqrt(2))."""
    return compendium.kzh_minimal_has_only_crazy_perturbation_1()


@pytest.fixture(scope="session")
def kzh_complex(kzh):
    """Delta P of kzh, built once."""
    return DeltaComplex(kzh)


@pytest.fixture(scope="session")
def kzh_covering(kzh, kzh_complex):
    """Covering protocol without the dense merge."""
    return generate_covered_components(kzh, assume_pwc=False, complex_=kzh_complex)


@pytest.fixture(scope="session")
def kzh_merged(kzh, kzh_complex):
    """Covering protocol with the dense merge."""
    return generate_covered_components(kzh, assume_pwc=True, complex_=kzh_complex)


@pytest.fixture(scope="session")
def kzh_crazy():
    """The +1/-1 coset certificate of non-extremality."""
    return compendium.kzh_crazy_perturbation()


@pytest.fixture(scope="session")
def kzh_file(tmp_path_factory, kzh):
    path = tmp_path_factory.mktemp("files") / "kzh.json"
    save_function_file(kzh, str(path))
    return str(path)


@pytest.fixture(scope="session")
def kzh_crazy_file(tmp_path_factory, kzh_crazy):
    path = tmp_path_factory.mktemp("files") / "kzh_crazy.json"
    save_perturbation_file(kzh_crazy, str(path))
    return str(path)


@pytest.fixture(scope="session")
def gmic_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("files") / "gmic.json"
    save_function_file(compendium.gmic(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def gomory_fractional_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("files") / "gomory_fractional.json"
    save_function_file(compendium.gomory_fractional(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def automorphism_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("files") / "average.json"
    save_function_file(compendium.gmic_automorphism_average(), str(path))
    return str(path)
