import pytest

from mcayley.repro.theorems import (
    CENSUS_CLAIMS,
    NEGATIVE_FIXTURES,
    verify_small_theorems,
)


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    return verify_small_theorems(directory=str(tmp_path_factory.mktemp("census")))


def test_all_claims_pass(report):
    failing = [c.name for c in report.claims if not c.passed]
    assert report.passed, failing


def test_bundles_present(report):
    names = [c.name for c in report.claims]
    for group, m, mode, _ in CENSUS_CLAIMS:
        assert f"census {group} m={m} {mode}" in names
    for fid in NEGATIVE_FIXTURES:
        assert f"fixture {fid} fails as constructed" in names
    assert "Z3 <= D6 and both pass the 3-PCI census" in names
    assert any("implies passing" in n for n in names)


def test_z2_is_not_2dci(report):
    claim = next(c for c in report.claims if c.name == "census Z2 m=2 digraph")
    assert claim.expected is False and claim.actual is False
    assert claim.detail == "58/64 mCI"


def test_report_serializes(report):
    data = report.to_json()
    assert data["passed"] and len(data["claims"]) == len(report.claims)
    assert all(line.startswith("PASS ") for line in report.lines())
