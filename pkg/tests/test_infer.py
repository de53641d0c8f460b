import numpy as np
import pytest

from lspacf.basis import make_basis
from lspacf.errors import InvalidArgumentError
from lspacf.infer import (
    BlockScores,
    BootstrapConfig,
    TestKind,
    block_scores,
    bootstrap_distribution,
    bootstrap_phi,
    bootstrap_stat,
    decide,
    run_test,
    run_test_fixed,
    stat_T1,
    stat_T1star,
    stat_T2,
    stat_TBP,
    statistic,
)
from lspacf.sieve import SieveFit, fit, residuals
from lspacf.simulate import simulate, tvar2


def _fit_with_block(block, family="legendre"):
    b = make_basis(family, len(block))
    c = len(block)
    return SieveFit(1, b, np.asarray(block, float), np.eye(c), 100, 100, 1.0)


@pytest.fixture(scope="module")
def wn():
    return simulate(tvar2(0.0, 0.0), 600, 21).values


def test_statistics_on_known_blocks():
    assert stat_T1(_fit_with_block([0.0, 0.0, 0.0])) == 0.0
    assert stat_T1(_fit_with_block([0.3, 0.0])) == pytest.approx(0.09)
    # 0.5 sin(2 pi t) in the Fourier basis has coefficient 0.5 / sqrt(2) on sqrt(2) sin
    sine = [0.0, 0.0, 0.5 / np.sqrt(2)]
    assert stat_T1(_fit_with_block(sine, "fourier")) == pytest.approx(0.125)
    assert stat_T1star(_fit_with_block(sine, "fourier")) == pytest.approx(0.125)
    assert stat_T1star(_fit_with_block([0.3, 0.0, 0.5 / np.sqrt(2)], "fourier")) == pytest.approx(0.125)
    assert stat_T1star(_fit_with_block([0.3, 0.0, 0.0])) == 0.0


def test_t2_and_tbp_definitions(wn):
    b = make_basis("legendre", 3)
    f1 = fit(wn, 1, b)
    assert stat_T2(f1) == pytest.approx(stat_T1(f1))
    assert stat_TBP(wn, b, 1) == pytest.approx(stat_T1(f1))
    f3 = fit(wn, 3, b)
    assert stat_T2(f3) == pytest.approx(float(f3.beta @ f3.beta))


def test_chebyshev_statistics_use_quadrature(wn):
    f = fit(wn, 1, make_basis("chebyshev", 4))
    t = (np.arange(1000) + 0.5) / 1000
    rho = f.basis(t) @ f.blocks[-1]
    assert stat_T1(f) == pytest.approx(np.mean(rho**2))
    assert stat_T1star(f) == pytest.approx(np.mean((rho - np.mean(rho)) ** 2), rel=1e-3)


class _ZeroRng:
    def standard_normal(self, size):
        return np.zeros(size)


def test_phi_degenerate_cases(wn):
    f = fit(wn, 1, make_basis("legendre", 3))
    np.testing.assert_array_equal(bootstrap_phi(wn, f, 5, _ZeroRng()), 0.0)
    x = 0.5 ** np.arange(60)
    fx = fit(x, 1, make_basis("legendre", 1))
    phi = bootstrap_phi(x, fx, 5, np.random.default_rng(0))
    np.testing.assert_allclose(phi, 0.0, atol=1e-12)


def test_block_scores_match_direct_sum(wn):
    # uncorrected scores against a literal transcription of the block-sum formula
    f = fit(wn, 2, make_basis("legendre", 3))
    m, n, ell = 7, wn.size, 2
    e = residuals(f, wn)
    w = np.array([[wn[j - 2], wn[j - 3]] for j in range(3, n + 1)]) * e[:, None]
    rows = []
    for i in range(ell + 1, n - m + 1):
        s = w[i - ell - 1 : i - ell - 1 + m + 1].sum(axis=0)
        rows.append(np.kron(s, f.basis(i / n)))
    direct = np.array(rows) / np.sqrt((n - m - ell + 1) * m)
    np.testing.assert_allclose(block_scores(wn, f, m, correct=False), direct, atol=1e-12)


def test_correction_adds_variance(wn):
    f = fit(wn, 1, make_basis("legendre", 5))
    raw = BlockScores(wn, f, correct=False).matrix(10)
    adj = BlockScores(wn, f, correct=True).matrix(10)
    assert np.trace(adj.T @ adj) > np.trace(raw.T @ raw)


def test_block_size_limits(wn):
    f = fit(wn, 1, make_basis("legendre", 2))
    with pytest.raises(InvalidArgumentError):
        block_scores(wn, f, 0)
    with pytest.raises(InvalidArgumentError):
        block_scores(wn, f, wn.size - 1)
    a = block_scores(wn, f, wn.size - 2)
    assert a.shape[0] == 1


def test_phi_covariance_matches_pi_hat(wn):
    f = fit(wn, 1, make_basis("legendre", 5))
    a = block_scores(wn, f, 20)
    pi = a.T @ a
    rng = np.random.default_rng(3)
    phis = np.array([bootstrap_phi(wn, f, 20, rng) for _ in range(2000)])
    emp = phis.T @ phis / 2000
    assert np.linalg.norm(emp - pi, 2) <= 0.1 * np.linalg.norm(pi, 2)


def test_bootstrap_stat_algebra(wn):
    b = make_basis("legendre", 2)
    f = SieveFit(2, b, np.zeros(4), np.sqrt(100.0) * np.eye(4), 100, 100, 1.0)  # Sigma_hat = I
    phi = np.array([0.0, 0.0, 1.0, 0.0])
    assert bootstrap_stat(np.zeros(4), f, TestKind.SINGLE_LAG) == 0.0
    assert bootstrap_stat(phi, f, TestKind.SINGLE_LAG) == pytest.approx(1.0)
    assert bootstrap_stat(phi, f, TestKind.CONSTANCY) == 0.0
    assert bootstrap_stat(np.array([1.0, 0, 0, 1.0]), f, TestKind.WHITE_NOISE) == pytest.approx(2.0)
    with pytest.raises(InvalidArgumentError):
        bootstrap_stat(np.zeros(3), f, TestKind.SINGLE_LAG)


def test_bootstrap_mean_tracks_null_statistic():
    # mean bootstrap statistic within 15% of mean nT1 across independent null samples
    b = make_basis("legendre", 3)
    nts, boots = [], []
    for r in range(150):
        x = simulate(tvar2(0.0, 0.0), 600, 500 + r).values
        f = fit(x, 1, b)
        nts.append(f.n * statistic(f, TestKind.SINGLE_LAG))
        boots.append(bootstrap_distribution(x, f, 8, 200, r, TestKind.SINGLE_LAG).mean())
    assert np.mean(boots) == pytest.approx(np.mean(nts), rel=0.15)


def test_decide_rule():
    boot = np.arange(1.0, 101.0)
    p, reject, ordered = decide(95.5, boot, 0.05)
    assert p == pytest.approx(0.05) and reject
    p, reject, _ = decide(95.0, boot, 0.05)
    assert p == pytest.approx(0.05) and not reject
    assert decide(0.0, boot, 0.05)[0] == 1.0


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        BootstrapConfig(B=50)
    with pytest.raises(InvalidArgumentError):
        BootstrapConfig(m=0)
    with pytest.raises(InvalidArgumentError):
        BootstrapConfig(alpha=1.0)


def test_constancy_needs_two_functions(wn):
    with pytest.raises(InvalidArgumentError):
        run_test_fixed(wn, "constancy", 1, c=1, B=100)


def test_run_test_deterministic_and_monotone_in_alpha(wn):
    b = make_basis("legendre", 3)
    r1 = run_test(wn, "lag", 1, b, BootstrapConfig(B=200, m=8, seed=4, alpha=0.05))
    r2 = run_test(wn, "lag", 1, b, BootstrapConfig(B=200, m=8, seed=4, alpha=0.05))
    assert r1.p_value == r2.p_value and r1.nT == r2.nT
    assert 0.0 <= r1.p_value <= 1.0
    decisions = [run_test(wn, "lag", 1, b, BootstrapConfig(200, 8, 4, a)).reject for a in (0.01, 0.05, 0.2, 0.5, 0.9)]
    assert decisions == sorted(decisions)


def test_strong_signal_rejects():
    x = simulate(tvar2(0.5, 0.0, stationary=False), 600, 9).values
    res = run_test_fixed(x, "lag", 1, c=5, m=8, B=200)
    assert res.reject and res.p_value == 0.0
    assert set(res.to_dict()) == {
        "kind", "lag_or_h", "T", "nT", "p_value", "reject", "alpha", "B", "c", "m", "basis", "seed"
    }
