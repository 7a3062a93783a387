import pytest
from hypothesis import given, settings, strategies as st

from moduli_betti.moduli import (
    IdentityError,
    _fm_from_phi,
    betti_fm,
    betti_m0n,
    betti_m0n1,
    euler_char,
    fm_tables,
    functional_residual,
    m0n_tables,
    solve_phi,
    solve_psi,
    verify_fm_identity,
)
from moduli_betti.series import U, Scaling, UPoly, ZSeries, series_binomial_power, series_reversion
from moduli_betti.tables import BettiTable, Space, TableValidationError

from oracle_values import FM_TABLES, M0N_TABLES

N = 24


@pytest.fixture(scope="module")
def phi():
    return solve_phi(N)


@pytest.fixture(scope="module")
def psi(phi):
    return solve_psi(N, phi)


def test_small_tables():
    assert betti_m0n(3).betti == (1,)
    assert betti_m0n(4).betti == (1, 1)
    assert betti_m0n(5).betti == (1, 5, 1)
    assert betti_m0n(6).betti == (1, 16, 16, 1)


@pytest.mark.parametrize("n", sorted(M0N_TABLES))
def test_m0n_matches_frozen_oracle(n):
    assert betti_m0n(n).betti == M0N_TABLES[n]


@pytest.mark.parametrize("n", sorted(FM_TABLES))
def test_fm_matches_frozen_oracle(n):
    assert betti_fm(n).betti == FM_TABLES[n]


def test_euler_characteristics():
    assert euler_char(betti_m0n(5)) == 7
    assert euler_char(betti_m0n(6)) == 34
    assert euler_char(betti_fm(2)) == 4


def test_solver_methods_agree(phi):
    rec = solve_phi(N, method="recurrence")
    assert rec == phi
    assert series_reversion(12) == solve_phi(12)


def test_solve_phi_errors():
    with pytest.raises(ValueError):
        solve_phi(0)
    with pytest.raises(ValueError):
        solve_phi(5, method="newton")


def test_resumes_from_memo():
    a = solve_phi(8)
    b = solve_phi(16)
    assert b.truncate(8) == a


def test_functional_residual_is_zero(phi):
    assert functional_residual(phi).is_zero()
    assert functional_residual(phi.truncate(12), method="binomial").is_zero()


def test_residual_detects_corruption(phi):
    cs = list(phi.coeffs)
    cs[7] = cs[7] + U
    bad = ZSeries(cs, phi.order, Scaling.EGF)
    res = functional_residual(bad)
    assert not res.is_zero()
    assert next(n for n in range(res.order + 1) if res[n]) == 7


def test_psi_paths(phi, psi):
    for n in range(2, N + 1):
        rep = verify_fm_identity(phi, psi, n)
        assert rep, rep.diff()
    assert series_binomial_power(phi, "u+1", method="binomial").truncate(10) == psi.truncate(10)


def test_fm_identity_report_diff(phi, psi):
    cs = list(psi.coeffs)
    cs[5] = cs[5] + UPoly([0, 0, 3])
    rep = verify_fm_identity(phi, ZSeries(cs, psi.order, Scaling.EGF), 5)
    assert not rep
    assert "u^2" in rep.diff()


def test_solve_psi_rejects_inconsistent_phi():
    # a phi that does not solve the functional equation makes the two psi paths disagree
    fake = ZSeries([0, 1, UPoly([1, 1])], 2, Scaling.EGF)
    with pytest.raises(IdentityError):
        solve_psi(2, fake)


def test_table_argument_checks(phi):
    with pytest.raises(ValueError):
        betti_m0n(2)
    with pytest.raises(ValueError):
        betti_fm(0)
    with pytest.raises(ValueError):
        betti_m0n(N + 5, phi)
    with pytest.raises(ValueError):
        betti_m0n(5, phi.rescale(Scaling.OGF))


def test_m0n1_is_shifted_m0n():
    t = betti_m0n1(5)
    assert t.space is Space.M0n1
    assert t.betti == betti_m0n(6).betti
    t.check_duality()


def test_table_lists(phi, psi):
    ms = m0n_tables(N, phi)
    assert [t.n for t in ms] == list(range(3, N + 1))
    fs = fm_tables(N, psi)
    assert [t.n for t in fs] == list(range(1, N + 1))
    for t in ms + fs:
        t.check_duality()
        assert t.is_positive()


@settings(max_examples=20, deadline=None)
@given(st.integers(3, N))
def test_tables_palindromic_with_exact_mean(n):
    t = betti_m0n(n)
    assert t.degree == n - 3
    assert t.is_palindromic()
    f = betti_fm(n)
    assert f.degree == n
    assert f.is_palindromic()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, N))
def test_fm_from_phi_is_integral(n):
    p = _fm_from_phi(solve_phi(N), n)
    assert p.is_integral() and p.is_nonnegative()
    assert p(1) == euler_char(betti_fm(n))


def test_table_validation():
    with pytest.raises(TableValidationError):
        BettiTable(Space.M0n, 5, (1, -5, 1))
    with pytest.raises(TableValidationError):
        BettiTable(Space.M0n, 5, (2, 5, 2))
    with pytest.raises(TableValidationError):
        BettiTable(Space.M0n, 5, ())
    with pytest.raises(TableValidationError):
        BettiTable(Space.M0n, 5, (1, 4, 2)).check_duality()
    with pytest.raises(TableValidationError):
        BettiTable(Space.M0n, 6, (1, 5, 1)).check_duality()


def test_record_round_trip():
    t = betti_m0n(30)
    assert BettiTable.loads(t.dumps()) == t
    rec = t.to_record()
    assert all(isinstance(b, str) for b in rec["betti"])
    for bad in ({"space": "M0n", "n": 5}, {"space": "X", "n": 5, "betti": ["1"]},
                {"space": "M0n", "n": "5", "betti": ["1"]}, {"space": "M0n", "n": 5, "betti": [1]},
                {"space": "M0n", "n": 5, "betti": ["1"], "extra": 0}):
        with pytest.raises(TableValidationError):
            BettiTable.from_record(bad)
