import pytest
from hypothesis import strategies as st

from cohsplit.group import OMEGA, GroupElement, Point
from cohsplit.periodic import PeriodicSet


def raw_member(threshold, modulus, residues, prefix, n):
    """Membership straight from the defining formula, no canonicalization."""
    if n < threshold:
        return n in prefix
    return n % modulus in residues


@st.composite
def raw_periodic(draw, max_threshold=12, max_modulus=12):
    threshold = draw(st.integers(0, max_threshold))
    modulus = draw(st.integers(1, max_modulus))
    residues = draw(st.sets(st.integers(0, modulus - 1)))
    prefix = draw(st.sets(st.integers(0, threshold - 1))) if threshold else set()
    return threshold, modulus, frozenset(residues), frozenset(prefix)


def periodic_sets(**kw):
    return raw_periodic(**kw).map(lambda r: PeriodicSet(*r))


def horizon(*sets):
    """A window long enough to decide equality of eventually periodic sets."""
    m = 1
    for s in sets:
        m = m * s.modulus
    return 2 * m + max(s.threshold for s in sets) + 1


points = st.builds(
    Point,
    st.sampled_from(["p", "q", "r"]),
    st.sampled_from(["a", "b", "c"]),
    st.one_of(st.integers(0, 4), st.just(OMEGA)),
)
elements = st.frozensets(points, max_size=6).map(GroupElement)


@pytest.fixture
def evens():
    return PeriodicSet(0, 2, [0])


@pytest.fixture
def odds():
    return PeriodicSet(0, 2, [1])
