import math

import pytest
from hypothesis import given, settings, strategies as st

from bnquintic.arith import PrimeField, is_prime, primes_in_range
from bnquintic.modularity import (
    InconsistentCountError,
    TraceRow,
    VerificationConfig,
    VerificationReport,
    compare_traces,
    determinant_check,
    full_verification,
    h2_eigenvalue_k_solver,
    h2_trace_candidates,
    hodge_solver,
    livne_prime_set,
    parity_check,
)
from bnquintic.qseries import f_coefficients
from bnquintic.varieties import count_U, count_Ytilde, count_Y

T_REF = [5, 7, 11, 13, 17, 19, 23, 73]


def test_livne_reference_set():
    L = livne_prime_set({2, 3})
    assert L.m == 24
    assert L.primes == T_REF
    assert L.T[1] == 73
    assert not (set(L.primes) & set(L.S))


def test_livne_generalized_against_scan():
    L = livne_prime_set({2, 3, 5})
    assert L.m == 120
    units = [r for r in range(120) if math.gcd(r, 120) == 1]
    assert sorted(L.T) == units
    for r in units:
        smallest = next(q for q in range(7, 10_000) if is_prime(q) and q % 120 == r)
        assert L.T[r] == smallest


def test_livne_needs_two():
    with pytest.raises(ValueError):
        livne_prime_set({3, 5})


@pytest.mark.parametrize("p,value", [(13, 38), (23, 168), (19, 20)])
def test_compare_traces_examples(p, value):
    (row,) = compare_traces([p])
    assert (row.a_p, row.t3, row.match) == (value, value, True)


def test_determinant_check():
    rows = compare_traces(T_REF)
    assert [r.t3 for r in rows] == [6, -16, 12, 38, -126, 20, 168, 218]
    flags = determinant_check(rows)
    assert all(flags.values())
    assert determinant_check(rows[::-1]) == flags
    assert determinant_check([TraceRow(5, 144, 0, 0, 0, True)]) == {5: False}


def test_parity_check_up_to_100():
    primes = primes_in_range(5, 100)
    flags = parity_check(primes)
    assert flags[5]["t3_even"]
    assert all(all(f.values()) for f in flags.values())


def test_a_p_equals_t3_for_good_primes_to_100():
    q = f_coefficients(100)
    for p in primes_in_range(5, 100):
        assert q[p] == p**3 - 19 - count_U(PrimeField(p)), p


def test_hodge_reference():
    assert hodge_solver(13, 11260, 50).admissible == [0]
    assert hodge_solver(13, 13080, 60).admissible == [0]


def _float_admissible(p, n, base, limit=50):
    return [a for a in range(limit)
            if abs(1 + (a + base) * (p + p * p) + p**3 - n) <= (2 * a + 2) * p**1.5]


def test_hodge_at_5_matches_direct_evaluation():
    sol = hodge_solver(5, 1620, 50)
    assert sol.admissible == _float_admissible(5, 1620, 50) == [0, 1, 2]
    assert sol.unique is None


def test_hodge_inconsistent_count():
    with pytest.raises(InconsistentCountError):
        hodge_solver(13, 0, 50)


def test_hodge_diamonds():
    y = hodge_solver(13, 11260, 50).diamond()
    z = hodge_solver(13, 13080, 60).diamond()
    assert y == {"h11": 50, "h21": 0, "euler": 100}
    assert z == {"h11": 40, "h21": 0, "euler": 80}


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(primes_in_range(5, 60)), st.integers(-20_000, 400_000),
       st.sampled_from([50, 60]))
def test_hodge_exact_agrees_with_float(p, delta, base):
    n = count_Y_shift(p, base) + delta
    try:
        exact = hodge_solver(p, n, base).admissible
    except InconsistentCountError:
        exact = []
    approx = _float_admissible(p, n, base, limit=max(exact, default=0) + 60)
    if exact != approx:
        # only a bound landing within rounding of an integer decision may differ
        for a in set(exact) ^ set(approx):
            lhs = 1 + (a + base) * (p + p * p) + p**3 - n
            assert math.isclose(abs(lhs), (2 * a + 2) * p**1.5, rel_tol=1e-12)


def count_Y_shift(p, base):
    return 1 + base * (p + p * p) + p**3


@pytest.mark.parametrize("p", [7, 11, 59])
def test_k_solver_examples(p):
    assert h2_eigenvalue_k_solver(p, count_Ytilde(PrimeField(p))) == 40


def test_k_solver_rejects_wrong_residue():
    with pytest.raises(ValueError):
        h2_eigenvalue_k_solver(13, 0)


def test_k_solver_inconsistent():
    p = 19
    n = count_Ytilde(PrimeField(p)) + 190  # half the spacing p + p^2
    assert h2_trace_candidates(p, n) == []
    with pytest.raises(InconsistentCountError, match="no k"):
        h2_eigenvalue_k_solver(p, n)


def test_k_solver_ambiguous_below_17():
    # at p = 7 the window (width 74) is wider than the spacing 56
    n = count_Ytilde(PrimeField(7)) + 14
    assert h2_trace_candidates(7, n) == [40, 41]
    with pytest.raises(InconsistentCountError, match="ambiguous"):
        h2_eigenvalue_k_solver(7, n)


def test_k_window_spacing_threshold():
    # spacing p + p^2 beats the window 4 p^(3/2) exactly when p > (2 + sqrt 3)^2
    for p in primes_in_range(5, 500):
        beats = (p + p * p) ** 2 > 16 * p**3
        assert beats == (p >= 17)


def test_full_verification_default():
    rep = full_verification()
    assert rep.verdict == "verified"
    assert rep.primes == T_REF
    assert rep.livne == {"S": [2, 3], "m": 24, "T": T_REF}
    assert [h["admissible"] for h in rep.hodge] == [[0], [0]]
    assert {k["k"] for k in rep.k_values} == {40}
    assert rep.scope == "reference"
    assert rep.bad_factors == {"2": "undetermined", "3": "undetermined"}


def test_full_verification_corrupted_count():
    rep = full_verification(VerificationConfig(counts={13: 2142}, k_range=None))
    assert rep.verdict == "failed: trace mismatch at p=13"
    assert not rep.verified


def test_full_verification_missing_class():
    rep = full_verification(VerificationConfig(primes=T_REF[:-1], k_range=None))
    assert rep.verdict == "incomplete: residue 1 mod 24 uncovered"


def test_full_verification_generalized_scope():
    rep = full_verification(VerificationConfig(S=(2, 3, 5), k_range=None))
    assert rep.scope == "generalized"
    assert rep.verdict == "verified"
    assert len(rep.rows) == 32


def test_full_verification_undetermined_hodge_prime():
    rep = full_verification(VerificationConfig(k_range=None, hodge_prime=5))
    assert rep.hodge[0]["admissible"] == [0, 1, 2]
    assert rep.verdict.startswith("incomplete: h21(Y) not determined at p=5")


def test_report_roundtrip():
    rep = full_verification(VerificationConfig(k_range=(7, 19)))
    again = VerificationReport.from_dict(rep.to_dict())
    assert again == rep
