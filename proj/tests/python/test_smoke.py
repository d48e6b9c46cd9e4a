import math

import numpy as np
import pytest

import frontier


def test_transaction_cost_by_hand():
    z = np.array([0.1, -0.1, 0.0])
    sigma = np.array([0.02, 0.01])
    volume = np.array([1e6, 4e6])
    got = frontier.transaction_cost(z, sigma, volume, 1e5, frontier.CostParams(a=0.001, b=1.0, c=0.0))
    expected = 0.001 * 0.2 + 0.02 * 0.1**1.5 / math.sqrt(10) + 0.01 * 0.1**1.5 / math.sqrt(40)
    assert got == pytest.approx(expected, abs=1e-15)


def test_summarize_and_discounting():
    s = frontier.summarize([0.01, -0.01, 0.02], [0.0, 0.0, 0.0])
    assert s["excess_return"] == pytest.approx(np.mean([0.01, -0.01, 0.02]))
    assert s["excess_risk"] == pytest.approx(np.std([0.01, -0.01, 0.02]))
    assert frontier.summarize([0.001] * 4, [0.001] * 4)["sharpe"] is None
    assert frontier.discounted_returns([1.0, 2.0, 3.0], 0.5) == [2.75, 3.5, 3.0, 0.0]


def test_factor_model_round_trip():
    rng = np.random.default_rng(3)
    b = rng.normal(size=(5, 5))
    cov = b @ b.T / 5
    model = frontier.fit_factor_model(cov, 5)
    np.testing.assert_allclose(model.covariance(), cov, atol=1e-10)
    low = frontier.fit_factor_model(cov, 2)
    np.testing.assert_allclose(np.diag(low.covariance()), np.diag(cov), atol=1e-10)
    h = rng.normal(size=5)
    assert low.quadratic_risk(h) == pytest.approx(h @ low.covariance() @ h, abs=1e-12)
    with pytest.raises(frontier.ConfigError):
        frontier.fit_factor_model(cov, 0)


def test_plan_trades_stays_on_the_simplex():
    cov = np.array([[4e-4, 1e-4], [1e-4, 2e-4]])
    forecasts = [np.array([0.002, 0.001, 0.0001]), np.array([0.001, 0.002, 0.0001])]
    plan = frontier.plan_trades(
        forecasts,
        np.array([0.0, 0.0, 1.0]),
        cov,
        sigma=np.array([0.01, 0.01]),
        volume=np.array([1e7, 1e7]),
        value=1e5,
        prefs=frontier.InvestorPreferences(gamma_risk=5, gamma_trade=1),
    )
    assert plan["converged"]
    assert len(plan["holdings"]) == 2
    for x in plan["holdings"]:
        assert x.sum() == pytest.approx(1.0, abs=1e-9)
        assert x.min() >= -1e-12
    cash_only = frontier.plan_trades(
        forecasts[:1], np.array([0.0, 0.0, 1.0]), cov, np.array([0.01, 0.01]), np.array([1e7, 1e7]),
        prefs=frontier.InvestorPreferences(gamma_risk=20000, gamma_trade=1),
    )
    assert cash_only["holdings"][0][2] > 0.99


def test_pareto_filter():
    risk, ret = frontier.pareto_filter([1.0, 2.0, 0.5, 3.0], [2.0, 1.0, 1.0, 3.0])
    assert risk == [0.5, 1.0, 3.0]
    assert ret == [1.0, 2.0, 3.0]
    with pytest.raises(frontier.DimensionError):
        frontier.pareto_filter([1.0], [])


def test_grids_and_cli(tmp_path):
    risk, trade = frontier.small_grid()
    assert len(risk) * len(trade) == 12
    risk, trade = frontier.full_grid()
    assert len(risk) * len(trade) == 504
    code, out, _ = frontier.run_cli(["--help"])
    assert code == 0 and "sweep" in out
    code, _, err = frontier.run_cli(["--config", str(tmp_path / "absent.ini"), "validate"])
    assert code != 0 and "absent.ini" in err
