import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CRITERIA: dict[int, str] = {}


def record_criterion(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
