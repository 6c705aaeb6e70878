"""Session-wide solver audit: every linear program solved anywhere in the
suite has its outcome re-verified from scratch; a single bad certificate
fails the test that produced it."""

import pytest

import hedgecert.lp as lp


class SolverAudit:
    def __init__(self):
        self.calls = 0
        self.failures = 0


@pytest.fixture(scope="session", autouse=True)
def solver_audit():
    audit = SolverAudit()
    original = lp.solve_lp

    def audited(problem):
        outcome = original(problem)
        audit.calls += 1
        if not lp.verify_certificate(problem, outcome):
            audit.failures += 1
            raise AssertionError(
                f"solve_lp returned a {outcome.status} outcome whose certificate "
                "fails verification"
            )
        return outcome

    lp.solve_lp = audited
    try:
        yield audit
    finally:
        lp.solve_lp = original
