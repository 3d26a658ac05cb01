import dataclasses

import pytest

from padeinterp.pade2p import build_two_point_pade, expand_large, expand_small, pole_report
from padeinterp.perturb import beta_expansion
from padeinterp.quarkonium import (
    DATA_DIR_ENV,
    REFERENCE_FITS,
    LevelDatum,
    LevelFileError,
    PoleInRangeError,
    fit_quality,
    guarded_poles,
    is_cancelled_doublet,
    level_interpolant,
    load_levels,
    oracle_level,
    parse_levels,
    predict_level,
    spectrum_report,
)
from padeinterp.radial import linear_energy_airy

HEADER = "name,flavor,n,mass_mev\n"
KEYS = [("charm", 1), ("charm", 2), ("bottom", 1), ("bottom", 2), ("bottom", 3)]


def test_default_levels(levels):
    assert [(d.name, d.flavor, d.n, d.mass) for d in levels] == [
        ("J/psi(1S)", "charm", 1, 3097.0),
        ("J/psi(2S)", "charm", 2, 3686.0),
        ("Upsilon(1S)", "bottom", 1, 9460.0),
        ("Upsilon(2S)", "bottom", 2, 10023.0),
        ("Upsilon(3S)", "bottom", 3, 10355.0),
    ]


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        (HEADER, "no levels"),
        ("a,b,c,d\n", "header"),
        (HEADER + "x,charm,1,abc\n", "line 2"),
        (HEADER + "x,charm,1\n", "line 2"),
        (HEADER + "x,strange,1,1000\n", "flavor"),
        (HEADER + "x,charm,0,1000\n", "n >= 1"),
        (HEADER + "x,charm,1,-5\n", "mass > 0"),
        (HEADER + "x,charm,1,3097\ny,charm,1,3100\n", "line 3: duplicate"),
    ],
)
def test_level_file_errors(text, match):
    with pytest.raises(LevelFileError, match=match):
        parse_levels(text)


def test_blank_lines_ignored():
    (d,) = parse_levels("\n" + HEADER + "\nx, charm, 2, 3686\n\n")
    assert d == LevelDatum("x", "charm", 2, 3686.0)


def test_data_dir_override(tmp_path, monkeypatch):
    (tmp_path / "levels.csv").write_text(HEADER + "only,bottom,1,9460\n")
    monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
    assert [d.name for d in load_levels()] == ["only"]


def test_params_validation():
    p = REFERENCE_FITS["unconstrained-2"]
    with pytest.raises(ValueError):
        dataclasses.replace(p, m_c=-1.0).validate()
    with pytest.raises(ValueError):
        dataclasses.replace(p, m_b=1000.0).validate()
    with pytest.raises(ValueError):
        dataclasses.replace(p, alpha=-0.1).validate()
    dataclasses.replace(p, alpha=0.0).validate()


def test_second_order_column(second_order):
    got = [predict_level(second_order, f, n) for f, n in KEYS]
    assert got == pytest.approx([3096.7, 3685.7, 9460.1, 10023.0, 10355.1], abs=0.1)
    assert predict_level(second_order, "charm", 1) == pytest.approx(3097, abs=5)
    assert predict_level(second_order, "bottom", 3) == pytest.approx(10355, abs=5)


def test_second_order_quality(second_order, levels):
    assert fit_quality(second_order, levels, 2) < 1.0


def test_first_order_quality(levels):
    p = REFERENCE_FITS["unconstrained-1"]
    assert fit_quality(p, levels, 1, pole_guard=False) == pytest.approx(13, abs=0.5)
    # the Upsilon(2S) interpolant has a genuine pole inside the guard interval
    with pytest.raises(PoleInRangeError) as info:
        fit_quality(p, levels, 1)
    (pole,) = info.value.poles
    assert pole.location == pytest.approx(0.343, abs=0.001)


def test_cancelled_doublet_is_ignored(second_order):
    r = level_interpolant(second_order, "charm", 1, 2)
    raw = pole_report(r, 0.0, 1.05)
    assert len(raw) == 1 and raw[0].location == pytest.approx(0.0805, abs=1e-3)
    assert raw[0].zero_distance < 1e-3
    assert is_cancelled_doublet(raw[0])
    assert guarded_poles(r) == []


def test_oracle_column(second_order):
    got = [oracle_level(second_order, f, n) for f, n in KEYS]
    assert got == pytest.approx([3097, 3687, 9456, 10020, 10356], abs=2)


def test_pade_matches_oracle(second_order):
    for f, n in KEYS:
        assert abs(predict_level(second_order, f, n) - oracle_level(second_order, f, n)) <= 5


def test_alpha_zero_is_airy(second_order):
    p = dataclasses.replace(second_order, alpha=0.0)
    for f, n in KEYS:
        expected = p.zero_point(f) + 1000 * linear_energy_airy(p.mass(f) / 2000, p.lam, n)
        assert predict_level(p, f, n) == pytest.approx(expected, rel=1e-12)
        assert oracle_level(p, f, n) == pytest.approx(expected, abs=1e-3)


def test_coulomb_limit(second_order):
    # lam -> 0 tends to the Coulomb level of the full radial Hamiltonian
    for f, n in KEYS:
        gaps = []
        for lam in (1e-6, 1e-8, 1e-10):
            p = dataclasses.replace(second_order, lam=lam)
            m = p.mass(f) / 1000
            coulomb = p.zero_point(f) - 1000 * m * p.alpha**2 / (4 * n * n)
            gaps.append(abs(predict_level(p, f, n, method="dalgarno-lewis") - coulomb))
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[1] < 0.01 and gaps[2] < 1e-3


def test_monotone_in_n():
    for p in REFERENCE_FITS.values():
        if p == REFERENCE_FITS["unconstrained-3"] or p == REFERENCE_FITS["unconstrained-1"]:
            continue
        for f, top in (("charm", 3), ("bottom", 3)):
            masses = [predict_level(p, f, n) for n in range(1, top + 1)]
            assert masses == sorted(masses) and len(set(masses)) == top


def test_flavours_differ_only_by_mass(second_order):
    p = second_order
    swapped = dataclasses.replace(p, m_c=p.m_b, V_c=p.V_b, m_b=p.m_b + 1)
    assert predict_level(swapped, "charm", 2) == pytest.approx(predict_level(p, "bottom", 2), rel=1e-14)


def test_self_consistent_data(second_order, levels):
    data = [LevelDatum(d.name, d.flavor, d.n, predict_level(second_order, d.flavor, d.n)) for d in levels]
    assert fit_quality(second_order, data) < 1e-6


def test_spectrum_report(second_order, levels):
    rep = spectrum_report(second_order, levels, with_oracle=False)
    assert rep["fit_quality_mev2"] == pytest.approx(fit_quality(second_order, levels))
    assert rep["order"] == 2 and rep["method"] == "bound-states"
    lv = rep["levels"][0]
    assert set(lv) >= {"name", "measured_mev", "predicted_mev", "oracle_mev", "residual_mev"}
    assert lv["residual_mev"] == pytest.approx(lv["measured_mev"] - lv["predicted_mev"])


@pytest.mark.parametrize("key", sorted(REFERENCE_FITS))
def test_published_interpolants_round_trip(key):
    p, order = REFERENCE_FITS[key], int(key[-1])
    for f, n in KEYS:
        pair = beta_expansion(p.mass(f) / 1000, p.alpha, p.lam, n, order, "bound-states")
        r = build_two_point_pade(pair.small, pair.large)
        assert expand_small(r, order).coeffs == pytest.approx(pair.small.coeffs, rel=1e-10)
        assert expand_large(r, order).coeffs == pytest.approx(pair.large.coeffs, rel=1e-10)


def test_published_constrained_point(levels):
    p = REFERENCE_FITS["constrained-2"]
    assert p.V_b - p.V_c == pytest.approx(2 * (p.m_b - p.m_c), abs=1.0)
    assert fit_quality(p, levels, 2) == pytest.approx(3.43, abs=0.05)
