import numpy as np
import pytest

from _oracles import dict_convolve, dict_step_law, dict_tv_uniform
from shuffle_lab import models, tvlab
from shuffle_lab.models import exact_step_law
from shuffle_lab.perm import (
    CapExceededError,
    DeckState,
    Permutation,
    images_array,
    invert,
    rank_lookup,
)
from shuffle_lab.tvlab import (
    GroupDistribution,
    StepAction,
    TVCurve,
    TVPoint,
    evolve_exact,
    exact_tv_curve,
    mc_statistic_tv,
    mixing_time_exact,
    threshold_scan,
    tv_distance,
)


def test_tv_basics():
    u = GroupDistribution.uniform(3)
    assert tv_distance(u, u) == 0.0
    point = GroupDistribution.point(DeckState.identity(3))
    assert tv_distance(point, u) == pytest.approx(5 / 6, abs=1e-15)


def test_tv_size_mismatch():
    with pytest.raises(Exception):
        tv_distance(GroupDistribution.uniform(3), GroupDistribution.uniform(4))


def test_distribution_validation():
    with pytest.raises(ValueError):
        GroupDistribution(3, np.full(6, 0.5))
    with pytest.raises(ValueError):
        GroupDistribution(3, np.full(5, 0.2))


def test_evolve_t0_is_point():
    start = DeckState((2, 1, 3))
    law = exact_step_law(models.overhand(0.5), 3)
    out = evolve_exact(law, 0, start)
    assert tv_distance(out, GroupDistribution.point(start)) == 0.0


def test_evolve_one_step_masses_n3():
    law = exact_step_law(models.overhand(0.5), 3)
    out = evolve_exact(law, 1, DeckState.identity(3))
    images = images_array(3)
    mass = {tuple(img): w for img, w in zip(images, out.mass)}
    assert mass[(1, 2, 3)] == pytest.approx(0.25)
    assert mass[(1, 3, 2)] == pytest.approx(0.25)
    assert mass[(2, 1, 3)] == pytest.approx(0.25)
    assert mass[(3, 2, 1)] == pytest.approx(0.25)
    assert mass[(2, 3, 1)] == 0.0
    assert mass[(3, 1, 2)] == 0.0


def test_evolve_two_steps_hand_values_n3():
    law = exact_step_law(models.overhand(0.5), 3)
    out = evolve_exact(law, 2, DeckState.identity(3))
    images = images_array(3)
    mass = {tuple(img): w for img, w in zip(images, out.mass)}
    assert mass[(1, 2, 3)] == pytest.approx(1 / 4, abs=1e-15)
    for transposition in ((1, 3, 2), (2, 1, 3), (3, 2, 1)):
        assert mass[transposition] == pytest.approx(1 / 8, abs=1e-15)
    for cycle in ((2, 3, 1), (3, 1, 2)):
        assert mass[cycle] == pytest.approx(3 / 16, abs=1e-15)


def test_exact_tv_curve_n3_values():
    curve = exact_tv_curve(models.overhand(0.5), 3, 2)
    assert curve.rows[1].tv == pytest.approx(1 / 3, abs=1e-12)
    assert curve.rows[2].tv == pytest.approx(1 / 8, abs=1e-12)


def test_evolution_matches_dict_oracle():
    for kind, mk in (
        ("overhand", models.overhand(0.5)),
        ("circular", models.circular_overhand(0.5)),
        ("rudvalis", models.rudvalis()),
    ):
        n = 4
        law_oracle = dict_step_law(kind, n, 0.5 if kind != "rudvalis" else None)
        mass_oracle = {tuple(range(1, n + 1)): 1.0}
        curve = exact_tv_curve(mk, n, 6)
        for t in range(1, 7):
            mass_oracle = dict_convolve(law_oracle, mass_oracle)
            assert curve.rows[t].tv == pytest.approx(
                dict_tv_uniform(mass_oracle, n), abs=1e-12
            )


def test_uniform_fixed_point():
    for mk in (models.overhand(0.3), models.rudvalis()):
        law = exact_step_law(mk, 4)
        action = StepAction(law)
        u = GroupDistribution.uniform(4).mass
        stepped = action.convolve(u)
        assert 0.5 * np.abs(stepped - u).sum() <= 1e-10


def test_mixing_time_examples():
    assert mixing_time_exact(models.overhand(0.5), 3, 0.25) == 2
    assert mixing_time_exact(models.overhand(0.5), 3, 1.0) == 0
    assert mixing_time_exact(models.rudvalis(), 3, 0.25) == 3


def test_mixing_time_rudvalis_oracle():
    # independent dict-based evolution
    law = dict_step_law("rudvalis", 3, None)
    mass = {(1, 2, 3): 1.0}
    t = 0
    while dict_tv_uniform(mass, 3) > 0.25:
        mass = dict_convolve(law, mass)
        t += 1
    assert mixing_time_exact(models.rudvalis(), 3, 0.25) == t


def test_mixing_time_not_reached():
    with pytest.raises(tvlab.MixingNotReachedError):
        mixing_time_exact(models.overhand(0.5), 4, 1e-9, t_max=3)


def test_cap_exceeded():
    with pytest.raises(CapExceededError):
        exact_tv_curve(models.overhand(0.5), 12, 2)


def test_tv_monotone_small():
    for mk in (models.overhand(0.5), models.circular_overhand(0.5), models.rudvalis()):
        curve = exact_tv_curve(mk, 4, 60)
        tvs = [r.tv for r in curve.rows]
        assert all(b <= a + 1e-12 for a, b in zip(tvs, tvs[1:]))


def test_inversion_symmetry_overhand():
    # q(sigma) = q(sigma^{-1}) makes the law from the identity inversion
    # symmetric at every time
    for n in (4, 5):
        law = exact_step_law(models.overhand(0.5), n)
        imgs = images_array(n)
        lut = rank_lookup(imgs)
        invrank = np.array(
            [
                lut[np.asarray(invert(Permutation(tuple(row))).image, dtype=np.int64).tobytes()]
                for row in imgs
            ]
        )
        action = StepAction(law)
        mass = GroupDistribution.point(DeckState.identity(n)).mass
        for _ in range(4):
            mass = action.convolve(mass)
            assert np.abs(mass - mass[invrank]).max() <= 1e-15


def test_curve_validation():
    with pytest.raises(ValueError):
        TVCurve((TVPoint(0, 0.5), TVPoint(0, 0.4)))
    with pytest.raises(ValueError):
        TVCurve((TVPoint(0, 1.5),))


def test_threshold_scan_separated_samples():
    est, ci = threshold_scan(np.full(500, 5.0), np.full(500, -5.0))
    assert est == 1.0
    est, _ = threshold_scan(np.zeros(500), np.zeros(500))
    assert est == 0.0


def test_mc_trials_validation():
    with pytest.raises(ValueError):
        mc_statistic_tv(models.overhand(0.5), 8, 1, trials=10, seed=0)


def test_mc_t0_is_sharp():
    pt = mc_statistic_tv(models.overhand(0.5), 64, 0, trials=2000, seed=4)
    assert pt.tv >= 0.99


def test_mc_converges_to_zero():
    pt = mc_statistic_tv(models.overhand(0.5), 6, 300, trials=2000, seed=4)
    width = pt.tv - pt.ci_low
    assert pt.tv <= 3 * width + 0.01


def test_mc_dominated_by_exact_small():
    # statistic lower bound <= exact TV + 2 CI wherever both exist
    for n in (4, 5):
        exact = exact_tv_curve(models.overhand(0.5), n, 20)
        ts = np.arange(0, 21, dtype=np.int64)
        mc = tvlab.mc_phi_curve(models.overhand(0.5), n, ts, 2000, seed=9)
        for er, mr in zip(exact.rows, mc.rows):
            ci = mr.tv - mr.ci_low
            assert mr.tv <= er.tv + 2 * ci + 1e-12


def test_mixing_time_proxy_monotone_location():
    tau, curve = tvlab.mixing_time_proxy(
        models.overhand(0.5), 16, 0.25, trials=500, seed=5
    )
    assert tau is not None and tau >= 1
    # the curve starts separated and ends mixed
    assert curve.rows[0].tv > 0.6
    assert curve.rows[-1].tv < 0.25


def test_mixing_time_proxy_rudvalis_blocks():
    tau, curve = tvlab.mixing_time_proxy(
        models.rudvalis(), 8, 0.25, trials=500, seed=5
    )
    assert tau is not None and tau % 8 == 0
    assert all(r.t % 8 == 0 for r in curve.rows)
