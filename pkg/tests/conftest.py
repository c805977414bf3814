from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from heritagekg.mapping import load_run_config
from heritagekg.materialiser import run_pipeline
from heritagekg.rdf import parse_turtle

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
BASE = "https://example.org/heritage/"


@pytest.fixture(scope="session")
def full_graph():
    g, reports = run_pipeline(load_run_config(FIXTURES / "run.ini"))
    return g, reports


@pytest.fixture(scope="session")
def small_graph():
    g, _ = run_pipeline(load_run_config(FIXTURES / "small" / "run_5row.ini"))
    return g


@pytest.fixture(scope="session")
def golden_shapes_graph():
    return parse_turtle((FIXTURES / "shapes" / "golden.ttl").read_text(encoding="utf-8"))


@pytest.fixture
def fixture_copy(tmp_path):
    """A writable copy of the fixture tree."""
    dest = tmp_path / "fixtures"
    shutil.copytree(FIXTURES, dest, ignore=shutil.ignore_patterns("out", "__pycache__"))
    return dest
