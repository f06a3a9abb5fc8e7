"""Smoke test for the ussort Python module.

Build and install first:
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

from math import comb

import ussort


def catalan(k):
    return comb(2 * k, k) // (k + 1)


def main():
    p = ussort.Permutation("2314")
    assert str(p.stack_sort()) == "2,1,3,4"
    assert p.entries == [2, 3, 1, 4]
    assert ussort.Permutation([2, 1, 3]).is_uniquely_sorted()
    assert ussort.Permutation("21435").fertility() == 1
    assert ussort.Permutation("123").fertility(method="brute") == 5
    assert ussort.Permutation("2314").canonical_hooks() == [(2, 4)]
    assert ussort.Permutation("231").canonical_hooks() is None
    assert str(ussort.Permutation("213").slide("swu")) == "2,1,3"

    iv = ussort.dl_forward("3254167")
    assert (iv.lower, iv.upper) == ("UUDDUD", "UUDUDD")
    assert ussort.dl_inverse(iv.lower, iv.upper) == ussort.Permutation("3254167")

    counts = [ussort.count_uniquely_sorted(k, "312") for k in range(6)]
    assert counts == [catalan(k) * catalan(k + 2) - catalan(k + 1) ** 2 for k in range(6)]
    assert [ussort.closed_form("kreweras", k) for k in range(5)] == [1, 1, 3, 12, 55]
    assert ussort.count_intervals("tamari", 4) == 68
    assert ussort.series_coefficients("C_of_xC", 6) == [1, 1, 3, 11, 44, 185, 804]

    seq = ussort.compute_sequence("231;4123", 5)
    assert [c for _, _, c in seq] == [1, 1, 3, 10, 36, 138]

    for q in ussort.uniquely_sorted(3, "312;1342"):
        assert ussort.upsilon_inverse(ussort.upsilon(q)) == q
        assert ussort.upsilon_direct(q) == ussort.upsilon(q)
    assert str(ussort.parking_inverse([1, 1])) == "3,1,4,2,5"

    try:
        ussort.dl_forward("123")
    except ValueError:
        pass
    else:
        raise AssertionError("precondition not enforced")

    passed, checks = ussort.verify("posets", 4)
    assert passed and len(checks) == 3
    print("smoke test passed")


if __name__ == "__main__":
    main()
