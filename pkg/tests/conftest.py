import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# (criterion id, ok, detail) tuples appended by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE, key=lambda r: _order(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid:<4} {detail}")


def _order(cid):
    digits = "".join(c for c in cid if c.isdigit())
    return int(digits), cid
