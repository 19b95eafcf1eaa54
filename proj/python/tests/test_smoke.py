import math

import pytest

import shotnoise as sn


def test_black_scholes_atm():
    terms = sn.OptionTerms(spot=100, strike=100, tau=1)
    assert sn.bs_price(terms, 0.2) == pytest.approx(7.96556745540579629, abs=1e-12)
    assert sn.price(terms, sn.AssetModel(sigma=0.2)) == pytest.approx(7.96556745540579629, abs=1e-9)


def test_backends_and_parity():
    terms = sn.OptionTerms(spot=100, strike=105, tau=0.75, rate=0.02, dividend=0.01)
    model = sn.AssetModel(lam=1.5, nu=-0.05, delta=0.15, sigma=0.1)
    series = sn.price(terms, model)
    fourier = sn.price(terms, model, backend="fourier")
    assert abs(series - fourier) < 1e-7
    assert abs(sn.parity_residual(terms, model)) < 1e-8


def test_greeks_and_identities():
    terms = sn.OptionTerms(spot=100, strike=90, tau=1, rate=0.03)
    model = sn.AssetModel(lam=1.0, nu=0.05, delta=0.2)
    g = sn.greeks(terms, model)
    assert 0 < g["delta"] < 1
    assert g["vega"] is None
    assert not g["extension"]
    report = sn.identity_report(terms, model)
    assert len(report) == 7
    assert max(report.values()) < 1e-4


def test_bond_and_moments():
    model = sn.RateModel(a=0.5, b=0.03, sigma_r=0.01, lambda_r=2, nu_r=0.01, delta_r=0.02)
    assert sn.bond_price(model, 2.0, 2.0, 0.05) == 1.0
    p = sn.bond_price(model, 0.0, 5.0, 0.03)
    assert 0 < p < 1
    assert math.log(p) == pytest.approx(
        sn.a_factor(model, 0.0, 5.0) - sn.b_factor(model, 0.0, 5.0) * 0.03, rel=1e-14
    )
    mean, var = sn.conditional_moments(model, 0.03, 1.0)
    assert var > 0 and mean > 0.03


def test_monte_carlo_is_reproducible():
    terms = sn.OptionTerms()
    model = sn.AssetModel(lam=1.0, nu=-0.05, delta=0.15, sigma=0.2)
    a = sn.mc_option_price(terms, model, paths=20000, seed=3)
    b = sn.mc_option_price(terms, model, paths=20000, seed=3)
    assert a == b
    assert abs(a[0] - sn.price(terms, model)) < 4 * a[1]


def test_errors():
    with pytest.raises(sn.DomainError):
        sn.price(sn.OptionTerms(spot=-1), sn.AssetModel())
    with pytest.raises(sn.ConvergenceError):
        sn.price(sn.OptionTerms(), sn.AssetModel(lam=1, nu=0.1), backend="fourier")
    with pytest.raises(sn.Error):
        sn.OptionTerms(kind="straddle")
