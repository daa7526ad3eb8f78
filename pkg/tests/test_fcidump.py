import io
import itertools

import numpy as np
import pytest

from qselci.errors import (
    EmptyInput,
    IndexOutOfRange,
    MalformedHeader,
    NonNumericValue,
)
from qselci.fcidump import (
    IntegralTable,
    parse_fcidump,
    serialize_fcidump,
    table_summary,
)

import helpers

SAMPLE = """&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,1,
 ISYM=1,
&END
 0.6746000000000000E+00 1 1 1 1
 0.6636000000000000E+00 1 1 2 2
 0.1813000000000000E+00 1 2 1 2
 0.6975000000000000E+00 2 2 2 2
-0.1252400000000000E+01 1 1 0 0
-0.4759000000000000E+00 2 2 0 0
 0.7137000000000000E+00 0 0 0 0
"""


def test_parse_sample():
    t = parse_fcidump(SAMPLE)
    assert t.n_orbitals == 2 and t.n_electrons == 2 and t.ms2 == 0
    assert t.n_alpha == 1 and t.n_beta == 1
    assert t.core_energy == pytest.approx(0.7137, abs=1e-14)
    assert t.get_h(0, 0) == pytest.approx(-1.2524)
    assert t.get_h(1, 0) == 0.0
    assert t.get_g(0, 0, 1, 1) == pytest.approx(0.6636)
    assert t.get_g(1, 1, 0, 0) == pytest.approx(0.6636)
    assert t.get_g(0, 1, 0, 1) == pytest.approx(0.1813)


def test_parse_accepts_bytes_and_streams():
    t1 = parse_fcidump(SAMPLE.encode("ascii"))
    t2 = parse_fcidump(io.StringIO(SAMPLE))
    t3 = parse_fcidump(io.BytesIO(SAMPLE.encode("ascii")))
    for t in (t1, t2, t3):
        assert t.n_orbitals == 2 and t.get_h(0, 0) == pytest.approx(-1.2524)


def test_fortran_d_exponents():
    text = "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n 1.5D+00 1 1 0 0\n 0.0 0 0 0 0\n"
    t = parse_fcidump(text)
    assert t.get_h(0, 0) == 1.5


def test_ms2_defaults_to_zero_and_orbsym_ignored():
    text = "&FCI NORB=3,NELEC=2, ORBSYM=1,1,1, ISYM=1 &END\n 0.0 0 0 0 0\n"
    t = parse_fcidump(text)
    assert t.ms2 == 0
    assert t.n_alpha == 1 and t.n_beta == 1


def test_single_line_header_with_slash():
    text = "&FCI NORB=2, NELEC=2, MS2=0 /\n 1.0 1 1 0 0\n"
    t = parse_fcidump(text)
    assert t.get_h(0, 0) == 1.0


def test_empty_input():
    with pytest.raises(EmptyInput):
        parse_fcidump("")
    with pytest.raises(EmptyInput):
        parse_fcidump("   \n  \n")


def test_missing_norb_is_malformed():
    with pytest.raises(MalformedHeader):
        parse_fcidump("&FCI NELEC=2,MS2=0 &END\n 0.0 0 0 0 0\n")
    with pytest.raises(MalformedHeader):
        parse_fcidump("&FCI NORB=2,MS2=0 &END\n 0.0 0 0 0 0\n")
    with pytest.raises(MalformedHeader):
        parse_fcidump("not an integral file\n")
    with pytest.raises(MalformedHeader):
        parse_fcidump("&FCI NORB=2,NELEC=2\n 0.0 0 0 0 0\n")  # never closed


def test_nonnumeric_value_reports_line():
    bad = "&FCI NORB=2,NELEC=2,MS2=0 &END\n 1.0 1 1 0 0\n oops 1 1 1 1\n"
    with pytest.raises(NonNumericValue) as err:
        parse_fcidump(bad)
    assert err.value.line_no == 3
    assert "line 3" in str(err.value)


def test_index_out_of_range_reports_line():
    bad = "&FCI NORB=2,NELEC=2,MS2=0 &END\n 1.0 1 3 0 0\n"
    with pytest.raises(IndexOutOfRange) as err:
        parse_fcidump(bad)
    assert err.value.line_no == 2


def test_inconsistent_zero_indices_rejected():
    bad = "&FCI NORB=2,NELEC=2,MS2=0 &END\n 1.0 1 1 1 0\n"
    with pytest.raises(IndexOutOfRange):
        parse_fcidump(bad)
    bad2 = "&FCI NORB=2,NELEC=2,MS2=0 &END\n 1.0 0 1 0 0\n"
    with pytest.raises(IndexOutOfRange):
        parse_fcidump(bad2)


def test_duplicate_record_last_write_wins_with_warning():
    text = (
        "&FCI NORB=2,NELEC=2,MS2=0 &END\n"
        " 1.0 1 1 1 1\n"
        " 2.0 1 1 1 1\n"
    )
    with pytest.warns(UserWarning):
        t = parse_fcidump(text)
    assert t.get_g(0, 0, 0, 0) == 2.0


def test_duplicate_record_within_tolerance_is_silent():
    # same value re-stated through a symmetry-equivalent index pattern
    text = (
        "&FCI NORB=2,NELEC=2,MS2=0 &END\n"
        " 1.0 1 2 1 1\n"
        " 1.0 2 1 1 1\n"
    )
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        t = parse_fcidump(text)
    assert t.get_g(0, 1, 0, 0) == 1.0


def test_orbital_energy_records_ignored_with_warning():
    text = "&FCI NORB=2,NELEC=2,MS2=0 &END\n -0.5 1 0 0 0\n 1.0 1 1 0 0\n"
    with pytest.warns(UserWarning):
        t = parse_fcidump(text)
    assert t.get_h(0, 0) == 1.0


def test_eightfold_symmetry_random_queries():
    import warnings

    rng = np.random.default_rng(17)
    t = IntegralTable(n_orbitals=5, n_electrons=4)
    stored = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # rewrites collide on purpose here
        for _ in range(1000):
            p, q, r, s = (int(x) for x in rng.integers(0, 5, size=4))
            v = float(rng.normal())
            t.set_g(p, q, r, s, v)
            for key in _equivalents(p, q, r, s):
                stored[key] = v
    for _ in range(1000):
        p, q, r, s = (int(x) for x in rng.integers(0, 5, size=4))
        expect = stored.get((p, q, r, s), 0.0)
        assert t.get_g(p, q, r, s) == expect


def _equivalents(p, q, r, s):
    return {
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    }


def test_permutation_invariance_exhaustive_small():
    t = helpers.random_table(3, 4, seed=2)
    for p, q, r, s in itertools.product(range(3), repeat=4):
        base = t.get_g(p, q, r, s)
        for key in _equivalents(p, q, r, s):
            assert t.get_g(*key) == base


def test_roundtrip_through_serialization():
    for table in (
        helpers.random_table(4, 4, seed=9),
        parse_fcidump(SAMPLE),
    ):
        text = serialize_fcidump(table)
        back = parse_fcidump(text)
        assert back.n_orbitals == table.n_orbitals
        assert back.n_electrons == table.n_electrons
        assert back.ms2 == table.ms2
        assert back.core_energy == pytest.approx(table.core_energy, abs=1e-12)
        assert np.allclose(back.h, table.h, atol=1e-12)
        assert set(back.g) == set(table.g)
        for key, v in table.g.items():
            assert back.g[key] == pytest.approx(v, abs=1e-12)


def test_summary_counts():
    t = parse_fcidump(SAMPLE)
    info = table_summary(t)
    assert info["n_orbitals"] == 2
    assert info["n_two_electron_classes"] == 4
    assert info["n_one_electron"] == 2  # two diagonal h entries
