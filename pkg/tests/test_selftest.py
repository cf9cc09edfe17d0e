import pytest

from pdgkit.selftest import GOLDEN_COMPUTE, golden_failures, load_golden, run


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_every_suite_is_green(seed):
    results = run(seed)
    assert {r.suite for r in results} == {"exactfield", "qcombinat", "ncomplex", "groupchain", "pdg",
                                          "certify", "golden"}
    for r in results:
        assert r.checks > 0 and r.failures == [], (r.suite, r.failures[:3])


def test_golden_file_matches_computation():
    g = load_golden()
    assert set(g) == set(GOLDEN_COMPUTE)
    assert golden_failures(g) == []
    assert g["example43"] == [[3, 1, 0, 0, 0], [1, 3, 0, 0, 0]]


def test_golden_mismatch_is_named():
    g = load_golden()
    g["torus1_p3"] = [4, 2]
    errs = golden_failures(g)
    assert len(errs) == 1 and "torus1_p3" in errs[0]


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run(0, only="nope")
