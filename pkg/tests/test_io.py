import numpy as np
import pytest

from hopfsoliton import ansatz, io
from hopfsoliton.errors import ProfileFormatError
from hopfsoliton.profiles import ModelParams, RadialProfile


def test_profile_round_trip_is_exact(tmp_path, rng):
    r = np.linspace(0.0, 10.0, 101)
    prof = RadialProfile(r, np.tanh(r) ** 2 + 1e-3 * rng.normal(size=101) * (r > 0) * (r < 10), np.tanh(r) ** 3)
    path = io.write_profile_csv(tmp_path / "p.csv", prof)
    back = io.read_profile_csv(path)
    np.testing.assert_array_equal(back.r, prof.r)
    np.testing.assert_array_equal(back.f_nodes, prof.f_nodes)
    np.testing.assert_array_equal(back.g_nodes, prof.g_nodes)


def test_csv_layout(tmp_path):
    path = io.write_csv(tmp_path / "a.csv", ["a", "b"], [[1.0, 0.1], [2.0, 1 / 3]])
    raw = path.read_bytes()
    assert b"\r" not in raw and b'"' not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "a,b"
    assert lines[2] == "0.10000000000000001,0.33333333333333331"


@pytest.mark.parametrize(
    "content",
    ["x,y,z\n0,0,0\n1,1,1\n", "r,f,g\n0,0\n1,1\n", "r,f,g\n0,0,0\nnot,a,number\n", "r,f,g\n1,0,0\n0,1,1\n"],
)
def test_malformed_profiles_are_rejected(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(ProfileFormatError):
        io.read_profile_csv(path)


def test_missing_profile_is_rejected(tmp_path):
    with pytest.raises(ProfileFormatError):
        io.read_profile_csv(tmp_path / "absent.csv")


def test_density_columns_add_up(tmp_path, solution):
    prof = solution.profile
    r = prof.r[1:]
    kin, gauge, pot = ansatz.action_density_terms(r, prof, ModelParams())
    header, data = io.read_csv(io.write_density_csv(tmp_path / "d.csv", r, kin, gauge, pot))
    assert header == ["r", "kinetic", "gauge", "potential", "total"]
    total = data[:, 1] + data[:, 2] + data[:, 3]
    assert np.max(np.abs(total - data[:, 4]) / np.maximum(1.0, np.abs(data[:, 4]))) < 1e-12


def test_field_csv_header(tmp_path):
    x = np.ones((2, 4))
    path = io.write_field_csv(tmp_path / "f.csv", x, np.zeros((2, 3)), np.zeros((2, 4, 3)))
    header, data = io.read_csv(path)
    assert header[:7] == ["x1", "x2", "x3", "x4", "phi1", "phi2", "phi3"]
    assert header[7] == "A11" and header[-1] == "A43" and data.shape == (2, 19)


def test_json_round_trip(tmp_path):
    payload = {"b": [1.0, 2.5], "a": {"x": 0.1}}
    path = io.write_json(tmp_path / "x.json", payload)
    assert io.read_json(path) == payload
    assert path.read_text().index('"a"') < path.read_text().index('"b"')
