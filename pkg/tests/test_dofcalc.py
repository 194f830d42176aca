import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from aligndof.dofcalc import (MAX_STAGES, Plan, Region, baseline_dofs, ici_count,
                              kappa_candidates, optimal_bounds, per_user_dof, plan, upper_bound)
from aligndof.exceptions import DegenerateBound

from oracles import brute_force_best_stage1, brute_force_total_dof


@pytest.mark.parametrize("args, expected", [
    ((3, 1, 4, 4), [1]),
    ((2, 1, 6, 6), [1]),
    # 4 <= (2 - kappa) 6 < 8 holds for kappa = 1
    ((2, 1, 6, 4), [1]),
    ((1, 1, 2, 5), [0, 1]),
])
def test_kappa_candidates(args, expected):
    assert kappa_candidates(*args) == expected


def test_per_user_dof_examples():
    assert per_user_dof(2, 2, 6, 6, 2, 1, 1, F(6)) == 2
    assert per_user_dof(2, 3, 8, 4, 3, 2, 1, F(8)) == F(8, 5)


def test_ici_count_examples():
    assert ici_count(2, 2, 2, 1, 1, 2) == 2
    assert ici_count(3, 2, 2, 1, 1, 1) == 3
    # no reduction when every transmitter targets everyone
    assert ici_count(4, 3, 2, 2, 3, F(1, 2)) == 3 * 3 * F(1, 2)


def test_plan_examples():
    p = plan(2, 2, 6, 6)
    s = p.stage1
    assert (s.K_t, s.kappa_t, s.K_r, s.d) == (2, 1, 1, 2)
    assert p.stage2 is None
    assert p.D == 8
    assert plan(2, 3, 8, 4).D == F(48, 5)


def test_single_cell_plan():
    p = plan(1, 2, 4, 2)
    assert p.D == 4
    assert p.n_ICI == 0


def test_plan_tie_break_matches_oracle():
    for cfg in [(2, 2, 6, 6), (2, 3, 8, 4), (3, 2, 4, 3), (2, 4, 5, 3)]:
        p = plan(*cfg, max_stages=1)
        s = p.stage1
        best = brute_force_best_stage1(*cfg)
        assert (s.K_t, s.kappa_t, s.K_r, s.d) == min(best, key=lambda o: (o[0], o[2], o[1]))


def test_plan_roundtrip():
    p = plan(2, 3, 8, 4)
    assert Plan.from_dict(p.as_dict()) == p


def test_stage_cap():
    with pytest.raises(ValueError):
        plan(2, 2, 6, 6, max_stages=MAX_STAGES + 1)
    assert plan(2, 5, 7, 5, max_stages=3).D >= plan(2, 5, 7, 5).D


def test_upper_bound():
    assert upper_bound(2, 3, 3) == 6
    assert upper_bound(2, 6, 4) == 9
    with pytest.raises(DegenerateBound):
        upper_bound(1, 3, 3)


def test_optimal_bounds_region():
    b = optimal_bounds(2, 5, 4, 4)
    assert b.D_decom == 20
    assert b.region is Region.REGION1
    assert b.C_A_inf == pytest.approx((5 + math.sqrt(5)) / 2)
    assert optimal_bounds(2, 2, 3, 3).region is Region.UNDEFINED
    # double root: the open interval (2, 2) is empty
    b4 = optimal_bounds(2, 4, 4, 4)
    assert b4.C_A_inf == b4.C_B_inf == 2
    assert b4.in_c_interval is False


def test_baselines():
    b = baseline_dofs(2, 2, 3, 3)
    assert (b.COS, b.Lee, b.LCell) == (3, 4, 4)
    assert baseline_dofs(3, 4, 6, 2).COS == 6
    assert baseline_dofs(3, 4, 6, 2).Lee is None
    assert baseline_dofs(2, 2, 6, 3).Lee == 6
    # too few transmit antennas for the L-cell scheme
    assert baseline_dofs(3, 1, 9, 1).LCell == 0


def test_no_stage_exceeds_budgets():
    for L, K, M, N in itertools.product(range(2, 4), range(1, 5), range(1, 7), range(1, 7)):
        p = plan(L, K, M, N)
        assert p.eta_r >= 0 and p.eta_t >= 0
        for stage in p.stages:
            assert stage.params.d <= stage.eta_t


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 7), st.integers(1, 9), st.integers(1, 9))
def test_plan_equals_oracle(L, K, M, N):
    assert plan(L, K, M, N).D == brute_force_total_dof(L, K, M, N)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 8), st.integers(1, 9), st.integers(1, 9))
def test_plan_below_upper_bound(L, K, M, N):
    if L * M > N:
        assert plan(L, K, M, N).D <= upper_bound(L, M, N)


def test_region_consistency():
    # Region1 exactly where the proper bound is the binding one
    for L, K, M, N in itertools.product((2, 3), range(4, 7), range(1, 9), range(1, 9)):
        b = optimal_bounds(L, K, M, N)
        assert (b.region is Region.REGION1) == (b.D_proper < b.D_decom)
