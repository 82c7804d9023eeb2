import pytest

from rotor_bands.exceptions import InvalidInput
from rotor_bands.verify import VerificationSuite, catch_exceptions


def test_catch_exceptions():
    @catch_exceptions
    def broken():
        raise ZeroDivisionError("no")

    passed, detail = broken()
    assert not passed
    assert "ZeroDivisionError" in detail


@pytest.mark.parametrize("criterion", [1, 2, 8, 10])
def test_fast_checks_pass(criterion):
    results = VerificationSuite(grid=64).run([criterion])
    assert len(results) == 1
    assert results[0].criterion == criterion
    assert results[0].passed, results[0].detail


def test_failing_check_is_reported(monkeypatch):
    suite = VerificationSuite(grid=64)
    monkeypatch.setitem(suite.checks, 1, ("broken", catch_exceptions(lambda: 1 / 0)))
    result, = suite.run([1])
    assert not result.passed
    assert "Error occurred" in result.detail


def test_unknown_check():
    with pytest.raises(InvalidInput):
        VerificationSuite().run([12])


def test_diagnostics():
    report = VerificationSuite().diagnostics([3, 5, 9])
    decay = [d for d in report if d.name == "decay ratio"]
    assert [d.q for d in decay] == [3, 5]
    ratios = [d for d in report if d.name == "log product ratio"]
    assert ratios[0].q == 5
    assert ratios[-1].q == 199


def test_determinant_check_at_extended_precision():
    suite = VerificationSuite()
    suite.DETERMINANT_MAX_Q = 24
    result, = suite.run([4])
    assert result.passed, result.detail
    measured, = [d for d in suite.diagnostics([]) if d.name == "smallest |det G^(d)|"]
    assert measured.value < suite.LITERAL_DETERMINANT_THRESHOLD


def test_flat_band_check_against_residual_floor():
    suite = VerificationSuite(grid=32)
    suite.SWEEP_MAX_Q = 5
    suite.SWEEP_MUS = (1.0,)
    result, = suite.run([3])
    assert result.passed, result.detail
    assert [d.name for d in suite.diagnostics([])][0] == "narrowest band width"
