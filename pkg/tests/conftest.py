import pytest

# criterion -> list of (part, ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(criterion, part, ok, detail=""):
        ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
        print("criterion %d [%s]: %s %s" % (criterion, part, "PASS" if ok else "FAIL", detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        ok = all(p[1] for p in parts)
        failed = [p[0] for p in parts if not p[1]]
        line = "criterion %2d: %s" % (c, "PASS" if ok else "FAIL")
        if failed:
            line += "  (failing parts: %s)" % ", ".join(failed)
        tr.write_line(line)
