import pytest

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}
REPORT = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not REPORT:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    if REPORT:
        tr.section("calibration report")
        for line in REPORT:
            tr.write_line(line)


@pytest.fixture
def tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path
