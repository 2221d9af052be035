import threading

import pytest
from hypothesis import given, settings, strategies as st

from pillai.recurrences import (
    SequenceKind,
    TermCache,
    binet_enclosure,
    fibonacci,
    growth_bounds_report,
    padovan,
    recompute,
    terms,
)

P, F = SequenceKind.PADOVAN, SequenceKind.FIBONACCI


def test_first_terms():
    assert terms(P, 15) == [1, 1, 1, 2, 2, 3, 4, 5, 7, 9, 12, 16, 21, 28, 37]
    assert terms(F, 12) == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_large_terms_are_exact():
    # F_300 from the doubling identities F_2k = F_k (2 F_(k+1) - F_k),
    # F_2k+1 = F_k^2 + F_(k+1)^2, independent of the cache
    def fib_pair(k):
        if k == 0:
            return 0, 1
        a, b = fib_pair(k // 2)
        c, d = a * (2 * b - a), a * a + b * b
        return (d, c + d) if k % 2 else (c, d)

    assert fibonacci(300) == fib_pair(300)[0]
    assert padovan(500) == recompute(P, 500)


def test_padovan_identity():
    for m in range(5, 501):
        assert padovan(m) - padovan(m - 1) == padovan(m - 5)


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        padovan(-1)
    with pytest.raises(ValueError):
        binet_enclosure(F, -3)


def test_cache_audit_and_prefix():
    cache = TermCache(P)
    assert cache.prefix(0) == []
    assert cache.get(40) == recompute(P, 40)
    assert cache.audit(40)


def test_concurrent_readers_see_consistent_terms():
    cache = TermCache(F)
    out = {}

    def worker(k):
        out[k] = cache.get(k)

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(200, 400, 7)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(v == recompute(F, k) for k, v in out.items())


@pytest.mark.parametrize("kind", [P, F])
def test_binet_enclosures_contain_terms(kind):
    for k in range(0, 201):
        enc = binet_enclosure(kind, k)
        assert enc.contains(recompute(kind, k)), k
        assert enc.width < 1


@given(st.integers(min_value=201, max_value=2000))
@settings(max_examples=25, deadline=None)
def test_binet_far_out(k):
    assert binet_enclosure(P, k).contains(padovan(k))


def test_growth_sandwiches_hold():
    assert growth_bounds_report(P, 4, 1000) == []
    assert growth_bounds_report(F, 1, 1000) == []


def test_growth_domain():
    with pytest.raises(ValueError):
        growth_bounds_report(P, 3, 10)
    with pytest.raises(ValueError):
        growth_bounds_report(F, 0, 10)
    assert growth_bounds_report(P, 10, 5) == []
