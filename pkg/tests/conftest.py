import pytest

from specdet.interaction import preset
from specdet.potential import EdgePotentials, PotentialProfile


@pytest.fixture
def well():
    return PotentialProfile.square_well(-4.0, 1.0)


@pytest.fixture
def well_kirchhoff(well):
    return EdgePotentials(well, PotentialProfile.zero()), preset("kirchhoff")


@pytest.fixture
def free():
    return EdgePotentials.free()


# acceptance criteria report: one line per criterion at the end of the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[number]
        status = "PASS" if all(ok for ok, _ in rows) else "FAIL"
        tr.write_line(f"criterion {number}: {status}")
        for ok, detail in rows:
            tr.write_line(f"    [{'ok' if ok else 'xx'}] {detail}")
