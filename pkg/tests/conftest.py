import pytest

from mixed3geo.jet_chart import sample_points
from mixed3geo.models import build_model

SEED = 42


@pytest.fixture(scope="session")
def sphere_neg():
    """s = +1 level set: negative structure, sigma = -1."""
    return build_model("pseudo-sphere:1:+1", SEED)


@pytest.fixture(scope="session")
def sphere_pos():
    """s = -1 level set: positive structure, sigma = +1."""
    return build_model("pseudo-sphere:1:-1", SEED)


@pytest.fixture(scope="session", params=["pseudo-sphere:1:+1", "pseudo-sphere:1:-1"])
def sphere(request):
    return build_model(request.param, SEED)


@pytest.fixture(scope="session", params=["product:pseudo-sphere:1:+1", "product:pseudo-sphere:1:-1"])
def product(request):
    return build_model(request.param, SEED)


@pytest.fixture(scope="session")
def ambient():
    return build_model("flat-pq:1", SEED)


@pytest.fixture(scope="session")
def flat_hyperplane():
    return build_model("flat-mixed:1", SEED)


def points(model, count=6, seed=SEED):
    return sample_points(model.chart, count, seed)


CRITERIA_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA_LINES):
            terminalreporter.write_line(CRITERIA_LINES[k])
