import math

import pytest

from fermat_eds import arith
from fermat_eds.eds import EdsContext
from fermat_eds.power_cert import (
    PowerCertificate,
    PowerHit,
    build_certificate,
    corollary15_search,
    cubic_sum_solutions,
    scan_powers,
    verify_scan_vs_certificate,
)

from conftest import FIXTURES


class FakeSequence:
    def __init__(self, values):
        self.values = values

    def W(self, m):
        return self.values[m - 1]


def test_scan_synthetic():
    hits = scan_powers(FakeSequence([8, 1, 36, 7, 2**6 * 3**6]), 5)
    assert PowerHit(1, 3, 2) in hits
    assert PowerHit(3, 2, 6) in hits
    assert {(h.l, h.root) for h in hits if h.m == 5} == {(2, 216), (3, 36)}
    assert all(h.m != 2 for h in hits) and hits.unit_terms == [2]
    assert all(h.m != 4 for h in hits)
    with pytest.raises(ValueError):
        scan_powers(FakeSequence([]), 0)


def _brute_powers(n):
    # every prime l with n an exact l-th power, by bisection per exponent
    out = set()
    for l in arith.primes_up_to(n.bit_length()):
        lo, hi = 1, 1 << (n.bit_length() // l + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**l < n:
                lo = mid + 1
            else:
                hi = mid
        if lo**l == n:
            out.add((l, lo))
    return out


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_scan_against_brute_force(contexts, name):
    ctx = contexts[name]
    hits = scan_powers(ctx, 12)
    for h in hits:
        assert h.root**h.l == ctx.W(h.m) >= 2
    want = {(m, l, r) for m in range(1, 13) if ctx.W(m) > 1 for l, r in _brute_powers(ctx.W(m))}
    assert {(h.m, h.l, h.root) for h in hits} == want


def test_scan_d7_no_hits(d7):
    hits = scan_powers(d7, 10)
    assert list(hits) == [] and hits.unit_terms == [1]


def test_certificate_d7(d7):
    cert = build_certificate(d7)
    assert cert.W1 == 1 and not cert.thm11_applicable
    assert not cert.thm12_applicable and not cert.thm13_applicable
    assert cert.p0 is None and cert.l_bound_value() is None and cert.allowed_l is None
    assert "inapplicable" in cert.verdict()


def test_certificate_d6_odd_W1(d6):
    cert = build_certificate(d6)
    assert cert.W1 == 21 and cert.thm11_applicable
    assert not cert.thm12_applicable and not cert.thm13_applicable
    assert cert.p0 == 5 and not cert.has_l_bound
    assert cert.verdict().startswith("finitely many")


def test_certificate_bound_instance(d7_triple):
    cert = build_certificate(d7_triple)
    assert cert.W1 == 38 and cert.ord2W1 == 1 and cert.p0 == 5
    assert cert.thm12_applicable and not cert.thm13_applicable
    assert cert.l_bound_value() == pytest.approx(6 + 2 * math.sqrt(5))
    assert cert.l_bound_floor() == 10
    assert [l for l in arith.primes_up_to(50) if cert.admits(l)] == [2, 3, 5, 7]
    assert "l <= 10" in cert.verdict()


def test_certificate_divisibility_instance(d15):
    cert = build_certificate(d15)
    assert cert.W1 == 294 and cert.ord2W1 == 1
    assert cert.thm13_applicable and cert.allowed_l == frozenset()
    assert cert.verdict().startswith("no perfect powers")
    assert not any(cert.admits(l) for l in arith.primes_up_to(100))
    assert list(scan_powers(d15, 25)) == []


def test_certificate_invariants(contexts):
    for ctx in contexts.values():
        cert = build_certificate(ctx)
        assert (cert.l_bound_value() is not None) == (cert.thm12_applicable and cert.p0 is not None)
        assert (cert.allowed_l is not None) == cert.thm13_applicable
        if cert.thm13_applicable:
            assert (cert.allowed_l == frozenset()) == (cert.ord2W1 == 1)
        assert cert.to_json()["verdict"] == cert.verdict()


def test_certificate_budget_monotone():
    for d, P in FIXTURES.values():
        small = build_certificate(EdsContext(d, P, trial_bound=10, rho_rounds=1))
        big = build_certificate(EdsContext(d, P))
        for flag in ("thm11_applicable", "thm12_applicable", "thm13_applicable"):
            assert getattr(small, flag) <= getattr(big, flag)


def test_certificate_with_triple_branch(monkeypatch):
    # generator 3P with the non-singularity test forced to "unknown"
    from fermat_eds.curves import from_weierstrass, multiply

    d, P = FIXTURES["d15"]
    base = EdsContext(d, P)
    Q = multiply(base.weierstrass, 3, base.generator_w)
    ctx = EdsContext(d, from_weierstrass(base.weierstrass, Q))
    assert ctx.W(1) % 6 == 0
    monkeypatch.setattr(ctx, "nonsingular_above_3", lambda: None)
    cert = build_certificate(ctx)
    assert cert.thm13_applicable and "found" in cert.reasons["thm13"]
    assert not cert.thm12_applicable
    # the untripled generator has no such escape
    monkeypatch.setattr(base, "nonsingular_above_3", lambda: None)
    assert not build_certificate(base).thm13_applicable


def _cert(**kw):
    base = dict(W1=2, ord2W1=1, p0=5, thm11_applicable=True, thm12_applicable=True, thm13_applicable=False)
    base.update(kw)
    return PowerCertificate(**base)


def test_verify_scan_vs_certificate():
    assert verify_scan_vs_certificate([], _cert()).passed
    rep = verify_scan_vs_certificate([PowerHit(3, 11, 2)], _cert())
    assert not rep.passed and rep.violations[0]["l"] == 11
    assert verify_scan_vs_certificate([PowerHit(3, 7, 2)], _cert()).passed
    c13 = _cert(W1=12, ord2W1=2, thm12_applicable=False, thm13_applicable=True, allowed_l=frozenset({2}))
    assert verify_scan_vs_certificate([PowerHit(2, 2, 5)], c13).passed
    assert not verify_scan_vs_certificate([PowerHit(2, 3, 5)], c13).passed


def test_bound_uses_ord2_when_larger():
    cert = _cert(W1=2**20, ord2W1=20)
    assert cert.l_bound_floor() == 20
    assert cert.admits(19) and cert.admits(20) and not cert.admits(23)


def _brute_cubic_sums(N, R):
    cubes = {u**3: u for u in range(-R, R + 1)}
    return {(u, cubes[N - u**3]) for u in range(-R, R + 1) if N - u**3 in cubes}


@pytest.mark.parametrize("N", [2, 9, 15, 28, 35, 91, 1729, 7680, 15 * 8, 6 * 21**3, 19 * 27])
def test_cubic_sum_solutions_against_scan(N):
    fac = arith.factor_with_effort(N)
    got = set(cubic_sum_solutions(N, fac.divisors()))
    assert got == _brute_cubic_sums(N, 2000)


def test_corollary_examples():
    assert _brute_cubic_sums(15, 1000) == set()
    sols = _brute_cubic_sums(15 * 2**9, 1000)
    assert all(math.gcd(math.gcd(u, v), 2) > 1 for u, v in sols)
    res = corollary15_search(5, 20)
    assert res.solutions == [] and res.unknown == [] and res.cells == 80
    with pytest.raises(ValueError):
        corollary15_search(1, 3)


def test_corollary_search_reports_unknown_cells():
    res = corollary15_search(2, 2, trial_bound=2, rho_rounds=0)
    assert res.cells == 2
    assert res.solutions == []
