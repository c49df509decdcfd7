from __future__ import annotations

from pathlib import Path

import pytest

from cosmos.catalog import load_platform
from cosmos.optimizer import load_point_table
from cosmos.workflow import bundled_fixture_dir, load_workflow_document

PLATFORMS = ("aws-x86", "aws-arm", "aws-lambda-edge", "gcp", "leo")
BILLED_PLATFORMS = ("aws-x86", "aws-arm", "aws-lambda-edge", "gcp")

FIXTURES = bundled_fixture_dir()


@pytest.fixture(scope="session")
def catalogs():
    return {pid: load_platform(pid) for pid in PLATFORMS}


@pytest.fixture(scope="session")
def pipeline():
    """The default bundled workflow plus its latency table."""
    return load_workflow_document(FIXTURES / "imagery-pipeline.json")


@pytest.fixture(scope="session")
def curve_study():
    """The workload variant behind the request-volume curve comparisons."""
    return load_workflow_document(FIXTURES / "imagery-pipeline-curve-study.json")


@pytest.fixture(scope="session")
def point_table():
    return load_point_table(FIXTURES / "tradeoff-points.json")


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES
