from collections import Counter

import numpy as np
import pytest

from aligndof.dofcalc import plan
from aligndof.exceptions import ConstructionError, DirectionsBudgetExceeded, PreconditionViolated
from aligndof.netmodel import make_config, sample_channel
from aligndof.orchestrator import (NetworkDesign, assign_targets, derive_seed, design_network,
                                   lemma1_check, lemma2_check, plan_covering, random_design,
                                   verify_design)


def _design(L, K, M, N, seed=1):
    cfg = make_config(L, K, M, N)
    ch = sample_channel(cfg, seed)
    p = plan(L, K, M, N)
    return cfg, ch, design_network(cfg, ch, p, seed)


def test_assign_targets():
    assert assign_targets(3, 1).targets == ((1,), (2,), (0,))
    for l, t in enumerate(assign_targets(3, 2).targets):
        assert set(t) == {0, 1, 2} - {l}
    counts = Counter(b for t in assign_targets(4, 2).targets for b in t)
    assert set(counts.values()) == {2}


def test_covering_single_system():
    assert plan_covering(2, 2, 2, 6) == [((0, 1), 2, {0: 2, 1: 2})]


def test_covering_meets_every_user():
    for K, K_t, d, n in [(4, 3, 2, 2), (5, 3, 3, 2), (6, 4, 5, 3), (3, 2, 3, 2)]:
        got = Counter()
        for subset, x, takes in plan_covering(K, K_t, d, n):
            assert len(subset) == K_t and x <= n
            for u, t in takes.items():
                assert t <= x
                got[u] += t
        assert all(got[u] == d for u in range(K))


def test_covering_budget():
    with pytest.raises(DirectionsBudgetExceeded):
        plan_covering(4, 3, 7, 2)


def test_derive_seed_stable():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(2, 1)


def test_design_two_cells():
    cfg, ch, design = _design(2, 2, 6, 6)
    assert len(design.precoders) == 4
    assert all(V.shape == (6, 2) for V in design.precoders.values())
    rep = verify_design(cfg, ch, design)
    assert rep.passed
    for b in rep.per_bs:
        assert (b.desired_dim, b.ici_dim, b.decodable) == (4, 2, True)
        assert list(b.ici_by_cell.values()) == [2]
    assert rep.ici_matches_prediction


def test_design_single_cell():
    cfg, ch, design = _design(1, 2, 4, 2)
    rep = verify_design(cfg, ch, design)
    assert rep.passed and rep.per_bs[0].ici_dim == 0


def test_design_zero_forcing():
    # N_t > K_r M_r, so the plan zero-forces toward the targeted BS
    cfg, ch, design = _design(2, 1, 2, 5)
    assert design.plan.stage1.kappa_t == 0
    rep = verify_design(cfg, ch, design)
    assert rep.passed
    assert all(b.ici_dim == 0 for b in rep.per_bs)


@pytest.mark.parametrize("cfg", [(2, 2, 5, 6), (2, 2, 7, 4), (2, 3, 7, 8)])
def test_design_two_stages(cfg):
    cfg, ch, design = _design(*cfg)
    assert design.plan.stage2 is not None
    assert len(design.stage_precoders) == 2
    rep = verify_design(cfg, ch, design)
    assert rep.passed
    # stage-2 columns are orthogonal to stage-1 columns of the same user
    for key, V1 in design.stage_precoders[0].items():
        V2 = design.stage_precoders[1][key]
        assert np.abs(V1.conj().T @ V2).max() < 1e-8


def test_fractional_design_notes():
    cfg, ch, design = _design(2, 3, 8, 4)
    assert design.d_int == (1,)
    assert any("symbol extension" in n for n in design.notes)
    assert verify_design(cfg, ch, design).passed


def test_fractional_below_one_fails():
    cfg = make_config(3, 6, 2, 1)
    p = plan(3, 6, 2, 1)
    assert p.d < 1
    with pytest.raises(ConstructionError):
        design_network(cfg, sample_channel(cfg, 0), p, 0)


def test_random_design_rejected():
    cfg = make_config(2, 2, 6, 6)
    ch = sample_channel(cfg, 4)
    rep = verify_design(cfg, ch, random_design(cfg, 2, 4))
    assert not rep.passed
    assert all(b.ici_dim == 4 and not b.decodable for b in rep.per_bs)


def test_design_json_roundtrip():
    cfg, ch, design = _design(2, 2, 6, 6)
    back = NetworkDesign.from_json(design.to_json())
    assert back.config == cfg and back.d_int == design.d_int
    for key, V in design.precoders.items():
        assert np.allclose(back.precoders[key], V)
    assert verify_design(cfg, ch, back).passed


def test_report_csv():
    cfg, ch, design = _design(2, 2, 6, 6)
    text = verify_design(cfg, ch, design).to_csv()
    header, *rows = text.strip().splitlines()
    assert len(rows) >= 1 and header.count(",") == rows[0].count(",")


def test_lemma1_examples():
    assert lemma1_check(2, 0, 2, 4, 4, seed=0)
    assert lemma1_check(3, 3, 2, 8, 3, seed=1)
    assert lemma1_check(4, 2, 2, 8, 2, seed=2)


def test_lemma2_examples():
    assert lemma2_check(4, 2, 2, 2, 2, seed=0)
    assert lemma2_check(3, 1, 1, 4, 4, seed=0)
    with pytest.raises(PreconditionViolated):
        lemma2_check(2, 1, 1, 2, 5, seed=0)
