import pytest

from laguerre_lab.ladder import aux_array
from laguerre_lab.orthopoly import recurrence_table
from laguerre_lab.params import PrecisionContext, WeightParams


@pytest.fixture(scope="session", autouse=True)
def lab_cache(tmp_path_factory):
    """Hermetic table cache shared across the test session."""
    import os

    path = tmp_path_factory.mktemp("labcache")
    old = os.environ.get("LAB_CACHE_DIR")
    os.environ["LAB_CACHE_DIR"] = str(path)
    yield path
    if old is None:
        os.environ.pop("LAB_CACHE_DIR", None)
    else:
        os.environ["LAB_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def prec120():
    return PrecisionContext(digits=120)


@pytest.fixture(scope="session")
def prec60():
    return PrecisionContext(digits=60)


@pytest.fixture(scope="session")
def params_default():
    return WeightParams("0.5", ("0.3", "0.2"))


@pytest.fixture(scope="session")
def params_neg_t1():
    return WeightParams("0.5", ("-0.3", "0.2"))


@pytest.fixture(scope="session")
def table12(params_default, prec120):
    return recurrence_table(params_default, 12, prec120)


@pytest.fixture(scope="session")
def aux12(table12):
    return aux_array(table12, 12)


@pytest.fixture(scope="session")
def table12_neg(params_neg_t1, prec120):
    return recurrence_table(params_neg_t1, 12, prec120)


@pytest.fixture(scope="session")
def aux12_neg(table12_neg):
    return aux_array(table12_neg, 12)
