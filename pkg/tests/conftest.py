import re

import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    entry = _ACCEPTANCE.setdefault(n, {"title": title, "ok": True, "ran": False, "detail": ""})
    if rep.when == "call" or rep.failed:
        entry["ran"] = True
        if rep.failed:
            entry["ok"] = False
            msg = str(rep.longrepr).strip().splitlines()
            entry["detail"] = next((m for m in reversed(msg) if m.startswith("E ")), msg[-1] if msg else "")
    for name, text in rep.sections:
        if "stdout" in name:
            found = re.findall(r"^DETAIL: (.*)$", text, re.M)
            if found:
                entry["detail"] = found[-1]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[n]
        status = "PASS" if e["ok"] and e["ran"] else ("FAIL" if e["ran"] else "NOT RUN")
        line = f"criterion {n:2d} {status}: {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)
