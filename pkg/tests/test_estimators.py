import math

import pytest

from caprese.errors import RootNotScorable
from caprese.estimators import (alpha, beta, oncotree_weight, score_all, shrinkage_score,
                                weight_matrix)
from caprese.genotype import ROOT
from caprese.probability import empirical_tables


def test_alpha_d1(d1):
    t = empirical_tables(d1)
    assert alpha(t, "a", "b") == pytest.approx(1.0)
    assert alpha(t, "b", "a") == pytest.approx(1 / 3)


def test_alpha_independent_and_disjoint(d2, d3):
    assert alpha(empirical_tables(d2), "a", "b") == 0.0
    assert alpha(empirical_tables(d3), "a", "b") == pytest.approx(-1.0)


def test_beta(d1, d2, d3):
    assert beta(empirical_tables(d1), "a", "b") == pytest.approx(1 / 7)
    assert beta(empirical_tables(d2), "a", "b") == 0.0
    assert beta(empirical_tables(d3), "a", "b") == pytest.approx(-1.0)


def test_shrinkage(d1):
    t = empirical_tables(d1)
    assert shrinkage_score(t, "a", "b", 0.5) == pytest.approx(4 / 7)
    assert shrinkage_score(t, "a", "b", 0.0) == alpha(t, "a", "b")
    assert shrinkage_score(t, "a", "b", 1.0) == beta(t, "a", "b")
    with pytest.raises(ValueError):
        shrinkage_score(t, "a", "b", 1.5)


def test_root_not_scorable(d1):
    t = empirical_tables(d1)
    with pytest.raises(RootNotScorable):
        alpha(t, ROOT, "a")
    with pytest.raises(RootNotScorable):
        beta(t, "a", ROOT)


def test_oncotree_weight(d1, d3):
    t = empirical_tables(d1)
    assert oncotree_weight(t, "a", "b") == pytest.approx(math.log(0.8))
    assert oncotree_weight(t, ROOT, "b") == pytest.approx(math.log(2 / 3))
    assert oncotree_weight(empirical_tables(d3), "a", "b") == -math.inf


def test_root_weight_finite_for_absent_event():
    from caprese.genotype import from_rows
    t = empirical_tables(from_rows("ab", [(1, 0), (0, 0)]))
    w = weight_matrix(t)
    assert w[0, 2] == 0.0  # log(1 / (1 + 0))


def test_score_all_matches_scalars(d1):
    t = empirical_tables(d1)
    m = score_all(t, "m", 0.5)
    assert m["a", "b"] == pytest.approx(4 / 7)
    assert math.isnan(m.values[0, 0])
    w = score_all(t, "w")
    assert w.labels[0] == ROOT
    assert w["a", "b"] == pytest.approx(math.log(0.8))
    assert not w.usable[:, 0].any()
    with pytest.raises(ValueError):
        score_all(t, "m")


def test_score_csv(d1):
    text = score_all(empirical_tables(d1), "alpha").to_csv()
    assert text.splitlines()[0] == ",a,b"
    assert text.splitlines()[1].startswith("a,,")
