import json
import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schemas():
    return {
        name: json.loads((ROOT / "schemas" / f"{name}.schema.json").read_text())
        for name in ("report", "geometry", "manifest")
    }


@pytest.fixture(scope="session")
def bundle(tmp_path_factory):
    import tdha

    path = tmp_path_factory.mktemp("bundle") / "small"
    tdha.generate_synthetic(path, super_count=2, classes_per_super=3, dim=16,
                            train_per_class=16, test_per_class=10, seed=2)
    return path


@pytest.fixture(scope="session")
def cli():
    """Path to the tdha executable, when the test runner provides one."""
    path = os.environ.get("TDHA_CLI")
    if not path:
        pytest.skip("TDHA_CLI not set")
    return path
