"""Shared fixtures: the canonical instances E1, E2, E3 and their value systems."""

from fractions import Fraction
from pathlib import Path

import pytest

from src.engine.snell import ValueSystem, value_backward
from src.engine.stopping_times import StoppingTime
from src.models.instance import Instance
from src.services.instances import canonical, save


@pytest.fixture(scope="session")
def e1() -> Instance:
    return canonical("E1")


@pytest.fixture(scope="session")
def e2() -> Instance:
    return canonical("E2")


@pytest.fixture(scope="session")
def e3() -> Instance:
    return canonical("E3")


@pytest.fixture(scope="session")
def vs1(e1) -> ValueSystem:
    return value_backward(e1.reward, e1.filtration)


@pytest.fixture(scope="session")
def vs2(e2) -> ValueSystem:
    return value_backward(e2.reward, e2.filtration)


@pytest.fixture(scope="session")
def vs3(e3) -> ValueSystem:
    return value_backward(e3.reward, e3.filtration)


@pytest.fixture
def instance_files(tmp_path, e1, e2, e3) -> dict[str, Path]:
    paths = {}
    for instance in (e1, e2, e3):
        path = tmp_path / f"{instance.name}.json"
        save(instance, path)
        paths[instance.name] = path
    return paths


def const(instance: Instance, t: int) -> StoppingTime:
    return StoppingTime.constant(len(instance.space), t)


def values(x) -> list[Fraction]:
    return list(x.values)
