import pytest

from app.core.exceptions import ConfigurationError
from app.utils.data_parser import parse_eps_grid, parse_strict_float
from app.utils.seeding import derive_seed


def test_parse_eps_grid_forms():
    assert parse_eps_grid("0.3") == [0.3]
    assert parse_eps_grid("0.2, 0.1") == [0.1, 0.2]
    grid = parse_eps_grid("0.05:0.5:0.05")
    assert grid == [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]
    assert parse_eps_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]


@pytest.mark.parametrize("value", ["", "abc", "nan", "inf", "-0.1", "0.5:0.1:0.1", "0:1:0"])
def test_parse_eps_grid_rejects(value):
    with pytest.raises(ConfigurationError):
        parse_eps_grid(value)


def test_parse_strict_float():
    assert parse_strict_float("1e-6") == 1e-6
    with pytest.raises(ConfigurationError):
        parse_strict_float("-inf")


def test_derive_seed():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(1, 3)
    assert derive_seed(1, 2, 0) != derive_seed(1, 2, 1)
    assert 0 <= derive_seed(123, 4) < 2 ** 63
