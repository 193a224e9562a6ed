import numpy as np
import pytest

from nnflux import approx, exact
from nnflux.dataset import (
    FluxDataset,
    SamplingSpec,
    build_dataset,
    rarefaction_scenario_burgers,
    read_dataset,
    sample_states,
    scenario_one_swe,
    split_indices,
    write_dataset,
)
from nnflux.errors import DryStateError, FormatError
from nnflux.nn import relative_loss
from nnflux.physics import PdeKind, PdeSystem

B1 = PdeSystem.burgers1d()
SWE1 = PdeSystem.swe1d()


def test_sampling_is_deterministic():
    for spec in (SamplingSpec.burgers(100, 5), SamplingSpec.swe(100, 5)):
        a, b = sample_states(spec), sample_states(spec)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])


def test_burgers_samples_in_range():
    up, um = sample_states(SamplingSpec.burgers(5000, 1))
    assert up.shape == um.shape == (5000, 1)
    assert np.all(np.abs(np.concatenate([up, um])) <= 3)


def test_swe_samples_in_range_and_conserved():
    Up, Um = sample_states(SamplingSpec.swe(5000, 2))
    for U in (Up, Um):
        h, u = U[:, 0], U[:, 1] / U[:, 0]
        assert np.all((h >= 1e-6) & (h <= 3.5))
        assert np.all(np.abs(u) <= 2.5 + 1e-12)
        np.testing.assert_array_equal(U[:, 1], h * (U[:, 1] / h))


def test_sampling_spec_validation():
    with pytest.raises(ValueError):
        SamplingSpec("swe1d", 10, 0, h_range=(-1.0, 3.0))
    with pytest.raises(ValueError):
        SamplingSpec("swe2d", 10, 0)
    with pytest.raises(ValueError):
        SamplingSpec("burgers1d", 0, 0)


def test_burgers_examples():
    ds = build_dataset([[1.0], [-1.0]], [[1.0], [1.0]], B1, with_lf="roe")
    np.testing.assert_array_equal(ds.target[:, 0], [0.5, 0.0])
    np.testing.assert_array_equal(ds.lf[:, 0], [0.5, 0.5])
    assert ds.target[1, 0] - ds.lf[1, 0] == -0.5
    assert ds[1].lf_flux[0] == 0.5
    assert build_dataset([[1.0]], [[1.0]], B1)[0].lf_flux is None


def test_roe_error_matches_reported_magnitude():
    # Known red: the population value of this ratio is 0.1429 under U(-3, 3)^2
    # sampling, just below the band around the reported 0.21.
    ds = build_dataset(*sample_states(SamplingSpec.burgers(20000, 0)), B1, with_lf="roe")
    err = relative_loss(ds.target, ds.lf, "l1")
    assert 0.7 * 0.21 <= err <= 1.3 * 0.21


def test_regenerable_targets():
    ds = build_dataset(*sample_states(SamplingSpec.swe(2000, 3)), SWE1, with_lf="hll")
    np.testing.assert_allclose(exact.godunov_flux(SWE1, ds.u_plus, ds.u_minus), ds.target, atol=1e-12, rtol=0)


def test_dry_sample_error_names_index():
    Up = np.array([[1.0, 0.0], [0.0, 0.0]])
    Um = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(DryStateError) as info:
        build_dataset(Up, Um, SWE1, with_lf="roe")
    assert info.value.index == 1


def test_rarefaction_scenario():
    up, um = rarefaction_scenario_burgers(10000, 0)
    assert up.shape == (10000, 1)
    assert np.all(exact.godunov_flux(B1, up, um) == 0.0)
    roe = approx.roe_flux(B1, up[:100], um[:100])
    assert np.all(roe != 0)
    np.testing.assert_allclose(
        roe[:, 0], 0.25 * (up[:100, 0] ** 2 + um[:100, 0] ** 2) - 0.5 * np.abs(0.5 * (up + um))[:100, 0] * np.abs(um - up)[:100, 0]
    )


def test_scenario_one():
    Up, Um = scenario_one_swe(2000, 1)
    assert np.all(Up[:, 0] == Um[:, 0])
    assert np.all((Up[:, 1] <= 0) & (Um[:, 1] >= 0))
    for (h, hu_l), (_, hu_r) in zip(Up, Um):
        assert exact.solve_swe_star(h, hu_l / h, h, hu_r / h).h_star < h


def test_scenario_one_waves_are_rarefactions():
    Up, Um = scenario_one_swe(200, 2)
    for (h, hu_l), (_, hu_r) in zip(Up, Um):
        star = exact.solve_swe_star(h, hu_l / h, h, hu_r / h)
        assert star.left_wave is star.right_wave is exact.Wave.RAREFACTION


def test_split_partitions_indices():
    tr, te = split_indices(1000, 0.1, 7)
    assert len(te) == 100 and len(np.intersect1d(tr, te)) == 0
    np.testing.assert_array_equal(np.sort(np.concatenate([tr, te])), np.arange(1000))


@pytest.mark.parametrize("lf", [None, "roe"])
def test_round_trip(tmp_path, lf):
    ds = build_dataset(*sample_states(SamplingSpec.swe(1000, 9)), SWE1, with_lf=lf)
    write_dataset(tmp_path / "d.csv", ds, comments=["config_hash=abc"])
    back = read_dataset(tmp_path / "d.csv")
    assert back.pde_tag is PdeKind.SWE_1D and back.lf_solver == lf
    for name in ("u_plus", "u_minus", "target", "lf"):
        a, b = getattr(ds, name), getattr(back, name)
        if a is None:
            assert b is None
        else:
            np.testing.assert_array_equal(a, b)


def test_header_mismatch(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("u_plus_0,u_minus_0,wrong_0\n1,2,3\n")
    with pytest.raises(FormatError):
        read_dataset(p)


@pytest.mark.parametrize("text", ["", "u_plus_0,u_minus_0,target_0\n"])
def test_empty_file_is_an_error(tmp_path, text):
    p = tmp_path / "d.csv"
    p.write_text(text)
    with pytest.raises(FormatError):
        read_dataset(p)


def test_bad_row_reports_line(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("u_plus_0,u_minus_0,target_0\n1,2,0.5\n1,x,3\n")
    with pytest.raises(FormatError) as info:
        read_dataset(p)
    assert info.value.line == 3
