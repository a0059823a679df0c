"""Acceptance checks for the shipped device model.

One test per criterion; each prints a pass/fail line for every check
row so a failing run shows exactly which band was missed.  The rows
come from `uscsim.validation`, the same module behind the `validate`
command, so the CLI and this suite can never drift apart.

Known deviations of the implemented model are documented in the
README; the corresponding tests fail honestly rather than being
weakened.
"""

import pytest

from uscsim import validation

pytestmark = pytest.mark.slow


def _report(index: int, rows) -> bool:
    ok = all(r.passed for r in rows)
    print(f"criterion {index}: {'PASS' if ok else 'FAIL'}")
    for r in rows:
        mark = "pass" if r.passed else "FAIL"
        print(
            f"  {mark}  {r.name}: actual={r.actual}"
            f"  expected={r.expected}  tolerance={r.tolerance}"
        )
    return ok


def test_criterion_1_analytic_coupling_estimate():
    assert _report(1, validation.criterion_1())


def test_criterion_2_anticrossing_size_and_location():
    assert _report(2, validation.criterion_2())


def test_criterion_3_variants_lose_the_anticrossing():
    assert _report(3, validation.criterion_3())


def test_criterion_4_dressed_matrix_elements():
    assert _report(4, validation.criterion_4())


def test_criterion_5_empty_cavity_transmission():
    assert _report(5, validation.criterion_5())


def test_criterion_6_floquet_matches_time_domain():
    assert _report(6, validation.criterion_6())


def test_criterion_7_second_harmonic_structure():
    assert _report(7, validation.criterion_7(threads=4))


def test_criterion_8_two_tone_interference():
    assert _report(8, validation.criterion_8(threads=4))


def test_criterion_9_solver_invariants():
    assert _report(9, validation.criterion_9())
