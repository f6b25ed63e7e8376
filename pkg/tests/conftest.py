from __future__ import annotations

from pathlib import Path

import pytest

from cohomqe.formula import load_formula, parse_formula

FORMULAS = Path(__file__).resolve().parent.parent / "formulas"


@pytest.fixture
def eg_psi():
    return load_formula(FORMULAS / "eg_qe.sexp")


def formula(text: str):
    return parse_formula(text)


TWO_POINTS = "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))"
THREE_POINTS = "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))"
TWO_LINES = "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))"

# formulas over P^1 (free) x P^1 (bound)
_H = "(blocks (w 1) (x 1)) (prefix exists) "
FIBRED = {
    "true": _H + "(and)",
    "twobase": _H + "(and (or (=0 w0_0) (=0 w0_1)) (=0 x0_0))",
    "fib2": _H + "(or (=0 x0_0) (=0 x0_1))",
    "mixed": _H + "(or (and (=0 w0_0) (=0 x0_0)) (=0 x0_1))",
    "cross": _H + "(or (and (=0 w0_0) (=0 x0_0)) (and (=0 w0_1) (=0 x0_1)) (and (=0 w0_0) (=0 x0_1)))",
}


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        line = next((ln for ln in report.capstdout.splitlines() if ln.startswith("criterion")),
                    None)
        name = report.nodeid.rsplit("::", 1)[1]
        _acceptance[name] = line or f"{name}: {'PASS' if report.passed else 'FAIL'}"


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance criteria")
        for name in sorted(_acceptance):
            terminalreporter.write_line(_acceptance[name])
