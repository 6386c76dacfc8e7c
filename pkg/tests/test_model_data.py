import numpy as np
import pytest

from probit_ep import (
    DimensionMismatch,
    NonBinaryResponse,
    NonFiniteCovariate,
    ParseError,
    PriorConfig,
    SimConfig,
    load_csv,
    save_csv,
    simulate,
    validate,
)


def test_validate_happy_path():
    data = validate([[1.0, 2.0], [3.0, 4.0]], [0, 1])
    assert data.n == 2 and data.p == 2
    assert data.y.dtype == np.int64
    assert data.X.flags.c_contiguous
    assert not data.X.flags.writeable
    assert not data.y.flags.writeable


def test_validate_dimension_errors():
    with pytest.raises(DimensionMismatch):
        validate(np.ones(3), [0, 1, 0])
    with pytest.raises(DimensionMismatch):
        validate(np.ones((2, 2)), np.zeros((2, 1)))
    with pytest.raises(DimensionMismatch):
        validate(np.ones((3, 2)), [0, 1])
    with pytest.raises(DimensionMismatch):
        validate(np.ones((0, 2)), [])


def test_validate_response_and_covariate_errors():
    with pytest.raises(NonBinaryResponse):
        validate(np.ones((2, 1)), [0, 2])
    with pytest.raises(NonBinaryResponse):
        validate(np.ones((2, 1)), [0.5, 1.0])
    with pytest.raises(NonFiniteCovariate):
        validate([[1.0], [np.nan]], [0, 1])
    with pytest.raises(NonFiniteCovariate):
        validate([[np.inf], [1.0]], [0, 1])


def test_prior_and_sim_config_validation():
    with pytest.raises(ValueError):
        PriorConfig(0.0)
    with pytest.raises(ValueError):
        PriorConfig(float("nan"))
    with pytest.raises(ValueError):
        SimConfig(n=0, p=3, seed=1)
    with pytest.raises(ValueError):
        SimConfig(n=3, p=3, seed=1, beta_gen="spline")


def test_csv_round_trip_is_exact(tmp_path):
    data, _ = simulate(SimConfig(n=17, p=5, seed=42), PriorConfig(25.0))
    path = tmp_path / "d.csv"
    save_csv(data, path)
    back = load_csv(path)
    assert np.array_equal(back.y, data.y)
    assert np.array_equal(back.X, data.X)  # bitwise, thanks to 17 digits


def test_load_csv_header_flag(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("y,x1\n1,0.5\n0,-0.25\n")
    data = load_csv(path, has_header=True)
    assert data.n == 2
    assert data.X[1, 0] == -0.25
    with pytest.raises(ParseError):
        load_csv(path)  # header row parses as a bad response


def test_load_csv_locates_bad_cells(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,0.5,2.0\n0,oops,3.0\n")
    with pytest.raises(ParseError) as err:
        load_csv(path)
    assert err.value.row == 2
    assert err.value.column == 2
    assert "row 2" in str(err.value)

    path.write_text("1,0.5\n0\n")
    with pytest.raises(ParseError) as err:
        load_csv(path)
    assert err.value.row == 2

    path.write_text("")
    with pytest.raises(ParseError):
        load_csv(path)

    path.write_text("1\n0\n")
    with pytest.raises(ParseError):
        load_csv(path)  # no covariate columns


def test_load_csv_rejects_nonbinary_response(tmp_path):
    path = tmp_path / "y2.csv"
    path.write_text("2,0.5\n")
    with pytest.raises(NonBinaryResponse):
        load_csv(path)


def test_simulate_is_deterministic():
    a_data, a_beta = simulate(SimConfig(n=9, p=4, seed=7), PriorConfig(4.0))
    b_data, b_beta = simulate(SimConfig(n=9, p=4, seed=7), PriorConfig(4.0))
    assert np.array_equal(a_data.X, b_data.X)
    assert np.array_equal(a_data.y, b_data.y)
    assert np.array_equal(a_beta, b_beta)
    c_data, _ = simulate(SimConfig(n=9, p=4, seed=8), PriorConfig(4.0))
    assert not np.array_equal(a_data.X, c_data.X)


def test_simulate_streams_are_independent():
    # X comes from its own child stream: switching the beta generator
    # must not perturb the covariates
    a_data, _ = simulate(SimConfig(n=6, p=3, seed=11), PriorConfig(1.0))
    b_data, b_beta = simulate(
        SimConfig(n=6, p=3, seed=11, beta_gen="fixed_unit"), PriorConfig(1.0)
    )
    assert np.array_equal(a_data.X, b_data.X)
    assert np.array_equal(b_beta, [1.0, -1.0, 1.0])


def test_simulate_prior_beta_scales_with_nu():
    _, small = simulate(SimConfig(n=2, p=50, seed=5), PriorConfig(1.0))
    _, large = simulate(SimConfig(n=2, p=50, seed=5), PriorConfig(100.0))
    assert np.allclose(large, 10.0 * small)


def test_simulate_responses_are_binary():
    data, _ = simulate(SimConfig(n=200, p=3, seed=0), PriorConfig(25.0))
    assert set(np.unique(data.y)) <= {0, 1}
    assert 0 < data.y.sum() < 200  # both classes show up at this size
