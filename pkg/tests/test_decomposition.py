import dataclasses
from fractions import Fraction

import pytest

from src.core.shared.exceptions import ValidationError
from src.engine.decomposition import (
    check_identities,
    decompose,
    flat_before,
    flat_off_contact_check,
)
from src.engine.filtered_space import RandomVar
from tests.conftest import const, values


def test_deterministic_decomposition(e1, vs1):
    d = decompose(vs1)
    assert [values(m) for m in d.m] == [[3], [3], [3]]
    assert [values(a) for a in d.a] == [[0], [0], [0]]
    assert [values(d.delta_c(t)) for t in range(3)] == [[0], [1], [0]]
    assert values(d.c_before(0)) == [0]
    assert values(d.c[-1]) == [1]
    assert d.contact == (frozenset(), frozenset({0}), frozenset({0}))
    assert check_identities(d).ok
    assert flat_off_contact_check(d).ok


def test_gap_decomposition_has_no_compensator(vs3):
    d = decompose(vs3)
    assert all(values(d.delta_c(t)) == [0, 0] for t in range(3))
    assert values(d.m[2]) == [3, 0]
    assert values(d.m[0]) == [Fraction(3, 2)] * 2


def test_flat_before(e1, vs1):
    d = decompose(vs1)
    assert flat_before(d, const(e1, 1), const(e1, 0)).ok
    report = flat_before(d, const(e1, 2), const(e1, 0))
    finding = report.first()
    assert finding.code == "compensator_growth"
    assert (finding.context["lhs"], finding.context["rhs"]) == ("1", "0")
    with pytest.raises(ValidationError):
        flat_before(d, const(e1, 0), const(e1, 1))


def test_identities_catch_a_broken_martingale(vs1):
    d = decompose(vs1)
    broken = type(d)(
        m=(d.m[0], RandomVar.of([4]), d.m[2]),
        a=d.a,
        c=d.c,
        contact=d.contact,
        values=d.values,
    )
    codes = {f.code for f in check_identities(broken).findings}
    assert {"reconstruction", "martingale"} <= codes


def test_compensator_growth_off_contact_is_flagged_at_its_time(vs1):
    d = decompose(vs1)
    one = RandomVar.of([1])
    # dC_0 := 1 where V(0) > phi_0; later levels carry the extra unit
    shifted = (d.c[0], d.c[0] + one, *(c + one for c in d.c[2:]))
    corrupted = dataclasses.replace(d, c=shifted)
    assert values(corrupted.delta_c(0)) == [1]
    report = flat_off_contact_check(corrupted)
    assert not report.ok
    finding = report.first()
    assert finding.code == "compensator_off_contact"
    assert finding.context["t"] == 0
    assert (finding.context["lhs"], finding.context["rhs"]) == ("1", "0")
