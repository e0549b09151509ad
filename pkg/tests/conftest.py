import numpy as np
import pytest

from sealrestore.synth import generate_synthetic, make_page, make_seal_template

SUITE_PAGES = 20
SUITE_SIZE = (480, 640)  # width, height
SUITE_TEMPLATES = 8


def build_suite(pages=SUITE_PAGES, size=SUITE_SIZE, n=10):
    """Seed-fixed ``(image_id, synthetic, clean, truth_mask)`` tuples."""
    templates = [make_seal_template(1000 + i) for i in range(SUITE_TEMPLATES)]
    out = []
    for i in range(pages):
        clean = make_page(size[0], size[1], i)
        syn, _placements, truth = generate_synthetic(clean, templates, n=n, seed=i)
        out.append((f"page_{i:02d}", syn, clean, truth))
    return out


@pytest.fixture(scope="session")
def suite():
    return build_suite()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary -----------------------------------------------------
# One PASS/FAIL line per acceptance criterion, printed after the run.

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.module.__name__.endswith("test_acceptance") and item.name.startswith("test_c"):
            doc = (item.function.__doc__ or "").strip().splitlines()
            _criteria[item.nodeid] = (item.name, doc[0] if doc else item.name)


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[report.nodeid] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (name, desc) in _criteria.items():
        status = _outcomes.get(nodeid, "NOT RUN")
        label = name.split("_")[1].upper()
        if "[" in name:
            label += name[name.index("["):]
        terminalreporter.write_line(f"{status:7} {label:14} {desc}")
