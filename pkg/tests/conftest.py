import pytest

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a measured-value string to the acceptance summary line."""

    def record(text: str):
        request.node.user_properties.append(("detail", text))

    return record


def pytest_runtest_logreport(report):
    marker = getattr(report, "_acceptance", None)
    if marker is None:
        return
    number, title = marker
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "passed": True, "detail": ""})
    if report.failed or (report.when == "call" and report.skipped):
        entry["passed"] = False
    for key, value in report.user_properties:
        if key == "detail":
            entry["detail"] = value


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result()._acceptance = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        verdict = "PASS" if e["passed"] else "FAIL"
        line = f"{verdict}  [{number:2d}] {e['title']}"
        if e["detail"]:
            line += f"  ({e['detail']})"
        terminalreporter.write_line(line)
