import json
import random

import pytest

from cimdse.optimize import Objective
from cimdse.pruning import BaseDataset
from cimdse.space import DesignSpace, ParameterDef, load_builtin_space
from cimdse.surrogate import SurrogateConfig, simulate
from cimdse.workloads import get_workload


@pytest.fixture(scope="session")
def sim_cfg():
    return SurrogateConfig()


@pytest.fixture(scope="session")
def resnet50_space():
    return load_builtin_space("resnet50_22nm")


@pytest.fixture(scope="session")
def swint_space():
    return load_builtin_space("swint_22nm")


@pytest.fixture(scope="session")
def vitb_space():
    return load_builtin_space("vitb_22nm")


@pytest.fixture(scope="session")
def resnet50_eval(sim_cfg):
    wl = get_workload("resnet50")
    return lambda pt: simulate(pt, wl, sim_cfg)


@pytest.fixture(scope="session")
def swint_eval(sim_cfg):
    wl = get_workload("swint")
    return lambda pt: simulate(pt, wl, sim_cfg)


@pytest.fixture(scope="session")
def vitb_base(vitb_space, sim_cfg):
    wl = get_workload("vitb")
    return BaseDataset.build(vitb_space, lambda pt: simulate(pt, wl, sim_cfg))


@pytest.fixture(scope="session")
def fom():
    return Objective("fom")


@pytest.fixture(scope="session")
def swint_optimum(swint_space, swint_eval, fom):
    """Exhaustive optimum objective value of the transformer target space."""
    return max(fom.value(swint_eval(pt)) for pt in swint_space.iter_points())


@pytest.fixture(scope="session")
def resnet50_optimum(resnet50_space, resnet50_eval, fom):
    return max(fom.value(resnet50_eval(pt)) for pt in resnet50_space.iter_points())


def tiny_space(rule: bool = False) -> DesignSpace:
    """Small three-parameter space for fast unit tests."""
    params = (
        ParameterDef("rowACIM", "ordinal", (32, 64, 128), default=64),
        ParameterDef("levelADC", "ordinal", (5, 6, 7), default=5),
        ParameterDef("memCellType", "categorical", ("SRAM", "RRAM"), default="SRAM"),
    )
    return DesignSpace(params, ("row_ge_parallel_read",) if rule else ())


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def request_corpus():
    import importlib.resources as resources

    text = (resources.files("cimdse") / "data" / "request_corpus.json").read_text()
    return json.loads(text)
