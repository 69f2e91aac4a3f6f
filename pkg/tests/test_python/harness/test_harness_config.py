import pytest

from accelmirror._common import ConfigError
from accelmirror.harness import ExperimentConfig, load_config_file, make_config
from accelmirror.harness.config import (
    FULL_SCALE_D,
    FULL_SCALE_STEPS,
    PRESETS,
    parse_algorithms,
    parse_relative_point,
    parse_step_policy,
)


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("amdr,md", ("mirror_descent", "amdr")),
        ("AMD", ("amd",)),
        ("md, amd ,amdr", ("mirror_descent", "amd", "amdr")),
        (["amd", "mirror_descent"], ("mirror_descent", "amd")),
        ("amd,amd,", ("amd",)),
    ],
)
def test_parse_algorithms_returns_the_fixed_order(text, expected):
    assert parse_algorithms(text) == expected


@pytest.mark.parametrize("text", ["sgd", "", " , ", "md,adam"])
def test_parse_algorithms_rejects_unknown_or_empty(text):
    with pytest.raises(ConfigError):
        parse_algorithms(text)


def test_parse_step_policy():
    assert parse_step_policy("absolute") == ("absolute", None)
    assert parse_step_policy(" Relative ") == ("relative", None)
    assert parse_step_policy("explicit:1e-3") == ("explicit", 1e-3)


@pytest.mark.parametrize(
    "text", ["explicit", "explicit:0", "explicit:-1", "explicit:nan", "explicit:abc", "absolute:2", "fixed"]
)
def test_parse_step_policy_rejects(text):
    with pytest.raises(ConfigError):
        parse_step_policy(text)


def test_parse_relative_point():
    assert parse_relative_point("optimum") == ("optimum", None)
    assert parse_relative_point("iterate:0") == ("iterate", 0)
    assert parse_relative_point(" Iterate:250") == ("iterate", 250)
    for bad in ("iterate", "iterate:-3", "iterate:1.5", "optimum:1", "start"):
        with pytest.raises(ConfigError):
            parse_relative_point(bad)


def test_default_config_and_derived_properties():
    cfg = ExperimentConfig()
    assert cfg.preset == "custom"
    assert cfg.algorithms == ("mirror_descent", "amd", "amdr")
    assert cfg.step_policy_kind == "absolute"
    assert cfg.explicit_h is None
    assert cfg.relative_iterate is None
    assert ExperimentConfig(relative_point="iterate:7").relative_iterate == 7
    assert cfg.schedule.describe() == "recurrence"

    explicit = ExperimentConfig(step_policy="explicit:0.5", gamma_schedule="linear:3")
    assert explicit.explicit_h == 0.5
    assert explicit.schedule.describe() == "linear:3.0"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"preset": "bogus"},
        {"geometry": "sphere"},
        {"objective": "cubic"},
        {"d": 0},
        {"d": 2.5},
        {"steps": -1},
        {"workers": 0},
        {"seed": -1},
        {"seed": True},
        {"objective": "power", "p": 3},
        {"algorithms": "adam"},
        {"step_policy": "explicit:0"},
        {"relative_point": "iterate:-1"},
        {"gamma_schedule": "cubic"},
        {"gamma_schedule": "constant:3"},
        {"r": 0.0},
        {"eps": float("inf")},
        {"amdr_gamma": -1.0},
        {"d": 2, "x0": (1.0,)},
    ],
)
def test_experiment_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_as_dict_is_json_ready():
    data = ExperimentConfig(d=2, x0=(0.5, 0.5)).as_dict()
    assert "overrides" not in data
    assert data["algorithms"] == ["mirror_descent", "amd", "amdr"]
    assert data["x0"] == [0.5, 0.5]


def test_presets():
    toy = make_config("toy_power")
    assert (toy.objective, toy.d, toy.p, toy.steps) == ("power", 2, 10, 10_000)
    assert toy.step_policy == "explicit:1"
    assert toy.x0 == (0.999, 0.001)
    assert toy.overrides == {}

    quad = make_config("quadratic")
    assert (quad.d, quad.steps, quad.step_policy) == (50, 5000, "absolute")
    assert make_config("quadratic_relative").step_policy == "relative"
    assert set(PRESETS) == {"toy_power", "quadratic", "quadratic_relative", "custom"}


def test_make_config_records_overrides():
    cfg = make_config("toy_power", {"steps": "200", "--amdr-gamma": 2})
    assert cfg.steps == 200
    assert cfg.amdr_gamma == 2.0
    assert cfg.overrides == {
        "amdr_gamma": {"preset": 1.0, "value": 2.0},
        "steps": {"preset": 10_000, "value": 200},
    }


def test_make_config_ignores_none_and_unchanged_values():
    cfg = make_config("toy_power", {"steps": 10_000, "seed": None})
    assert cfg.overrides == {}


def test_changing_the_dimension_drops_the_preset_start():
    cfg = make_config("toy_power", {"d": 3})
    assert cfg.x0 is None
    assert cfg.overrides["x0"] == {"preset": [0.999, 0.001], "value": None}

    kept = make_config("toy_power", {"d": 3, "x0": "0.5, 0.25, 0.25"})
    assert kept.x0 == (0.5, 0.25, 0.25)


def test_full_scale_is_recorded():
    cfg = make_config("quadratic", full_scale=True)
    assert (cfg.d, cfg.steps) == (FULL_SCALE_D, FULL_SCALE_STEPS)
    assert cfg.overrides["d"] == {"preset": 50, "value": FULL_SCALE_D}
    assert cfg.overrides["steps"] == {"preset": 5000, "value": FULL_SCALE_STEPS}


def test_make_config_rejects_bad_input():
    with pytest.raises(ConfigError):
        make_config("nope")
    with pytest.raises(ConfigError):
        make_config("custom", {"learning_rate": 0.1})
    with pytest.raises(ConfigError):
        make_config("custom", {"d": "five"})
    with pytest.raises(ConfigError):
        make_config("custom", {"x0": "a,b"})


def test_load_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# quadratic on the cube\n"
        "preset = quadratic\n"
        "\n"
        "geometry = hypercube   # inline comment\n"
        "step-policy = explicit:0.01\n"
        "D = 4\n",
        encoding="utf-8",
    )
    values = load_config_file(path)
    assert values == {
        "preset": "quadratic",
        "geometry": "hypercube",
        "step_policy": "explicit:0.01",
        "d": "4",
    }
    preset = values.pop("preset")
    cfg = make_config(preset, values)
    assert cfg.geometry == "hypercube"
    assert cfg.d == 4
    assert cfg.explicit_h == 0.01


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.conf")
    bad = tmp_path / "bad.conf"
    bad.write_text("steps 100\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="bad.conf:1"):
        load_config_file(bad)
