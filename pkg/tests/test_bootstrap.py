import csv
import io
import json

import pytest

from caprese.bootstrap import nonparametric_bootstrap, parametric_bootstrap, report_from_dict
from caprese.genotype import ROOT, from_rows
from caprese.probability import NoiseSpec
from caprese.reconstruct import caprese
from caprese.synthesis import GenerativeModel, make_rng, sample


def chain():
    return GenerativeModel("tree", ("a", "b", "c"), {"a": (ROOT,), "b": ("a",), "c": ("b",)},
                           {"a": 0.8, "b": 0.7, "c": 0.6})


@pytest.fixture(scope="module")
def chain_data():
    return sample(chain(), 2000, make_rng(1))


def test_stable_chain_converges(chain_data):
    rep = nonparametric_bootstrap(chain_data, "caprese", 0.01, B=200, seed=2)
    assert rep.overall_confidence == 1.0
    assert rep.reference == chain().to_forest()
    assert rep.confidence("a", "b") == 1.0


def test_fixed_seed_is_bit_identical(chain_data):
    a = nonparametric_bootstrap(chain_data.take_rows(range(60)), "caprese", 0.5, B=30, seed=9)
    b = nonparametric_bootstrap(chain_data.take_rows(range(60)), "caprese", 0.5, B=30, seed=9)
    assert a.to_json() == b.to_json()
    assert a.edge_table_csv() == b.edge_table_csv()


def test_jobs_do_not_change_results(chain_data):
    small = chain_data.take_rows(range(80))
    a = nonparametric_bootstrap(small, "oncotree", B=24, seed=4, jobs=1)
    b = nonparametric_bootstrap(small, "oncotree", B=24, seed=4, jobs=2)
    assert a.to_json() == b.to_json()


def test_fractions_and_overall_bound(chain_data):
    small = chain_data.take_rows(range(40))
    for algo in ("caprese", "oncotree"):
        rep = nonparametric_bootstrap(small, algo, 0.5, B=50, seed=3)
        assert all(0.0 <= c <= 1.0 for c in rep.edge_confidence.values())
        ref_min = min(rep.confidence(p, v) for p, v in rep.reference.edges())
        assert rep.overall_confidence <= ref_min
        labels = [ROOT, "a", "b", "c"]
        assert set(rep.edge_confidence) == {(u, v) for u in labels for v in labels[1:] if u != v}


def test_invalid_replicates_flagged():
    m = from_rows("ab", [(1, 0), (1, 1), (0, 0), (0, 0), (0, 0)])
    rep = nonparametric_bootstrap(m, "caprese", 0.5, B=100, seed=0)
    assert rep.invalid > 0
    assert len(rep.invalid_replicates) == rep.invalid
    d = json.loads(rep.to_json())
    assert d["invalid_replicates"] == list(rep.invalid_replicates)


def test_parametric_zero_noise_large_sample(chain_data):
    ref = caprese(chain_data, 0.01)
    rep = parametric_bootstrap(ref, 2000, NoiseSpec(), "caprese", 0.01, B=50, seed=5, data=chain_data)
    assert rep.overall_confidence >= 0.95
    assert rep.mode == "parametric" and rep.eps_plus == 0.0


def test_parametric_noise_lowers_confidence(chain_data):
    ref = caprese(chain_data, 0.5)
    clean = parametric_bootstrap(ref, 100, NoiseSpec(), B=60, seed=6, data=chain_data)
    noisy = parametric_bootstrap(ref, 100, NoiseSpec(0.21, 0.027), B=60, seed=6, data=chain_data)
    assert noisy.overall_confidence < clean.overall_confidence


def test_parametric_needs_a_model(chain_data):
    with pytest.raises(ValueError):
        parametric_bootstrap(caprese(chain_data), 10, B=2)


def test_bad_arguments(chain_data):
    with pytest.raises(ValueError):
        nonparametric_bootstrap(chain_data, B=0)
    with pytest.raises(ValueError):
        nonparametric_bootstrap(chain_data, algo="bogus", B=2)


def test_table_layout(chain_data):
    rep = nonparametric_bootstrap(chain_data.take_rows(range(100)), "caprese", 0.5, B=10, seed=1)
    rows = list(csv.reader(io.StringIO(rep.edge_table_csv())))
    assert rows[0] == ["from\\to", "a", "b", "c"]
    assert [r[0] for r in rows[1:]] == [ROOT, "a", "b", "c"]
    assert rows[2][1] == ""  # diagonal
    assert report_from_dict(rep.to_dict()) == rep.edge_confidence
