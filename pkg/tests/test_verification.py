import pytest

from inerton_lab import verification as v


@pytest.mark.parametrize("check,status", [
    (v.Check("a", "r", 1e-9, 0.0, 1e-8), "PASS"),
    (v.Check("a", "r", 1e-7, 0.0, 1e-8), "FAIL"),
    (v.Check("a", "r", 2.0, 2.0, 0.0, kind="exact"), "PASS"),
    (v.Check("a", "r", 2.0, 2.0000000000000004, 0.0, kind="exact"), "FAIL"),
    (v.Check("a", "r", 1e9, 0.0, 0.0, kind="info"), "INFO"),
])
def test_check_status(check, status):
    assert check.status == status
    assert check.passed == (status != "FAIL")


def test_suite_time_budget():
    res = v.SuiteResult("x", [v.Check("a", "r", 0.0, 0.0, 1.0)], seconds=6.0, time_limit=5.0)
    assert not res.passed


def test_report_has_no_timing_by_default():
    results = [v.run_suite("dirac"), v.run_suite("crystallite")]
    plain = v.report_lines(results)
    timed = v.report_lines(results, timing=True)
    assert plain[0] == ",".join(v.REPORT_COLUMNS)
    assert not any("runtime" in line for line in plain)
    assert any("runtime" in line for line in timed)


def test_unknown_suite():
    with pytest.raises(KeyError):
        v.run_suite("nope")


def test_sweep_rows_residuals():
    rows = v.scale_rows(v.ParticleParams(), [0.2, 0.7])
    assert [r["v0"] for r in rows] == [0.2, 0.7]
    assert all(r[k] <= v.MACHINE_TOL for r in rows for k in r if k.startswith("res_"))
