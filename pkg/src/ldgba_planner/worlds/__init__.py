"""Grid worlds, environment files and named presets."""
from .envfile import EnvFileError, GridSpec, format_env, load_env, parse_env, save_env
from .grid import GridError, World, build_grid, observation_alphabet
from .presets import PRESETS, Preset, UnknownPresetError, env_path, preset, preset_spec


def build_office_single_obs() -> World:
    return build_grid(preset_spec("office_single_obs"))


__all__ = [
    "EnvFileError",
    "GridError",
    "GridSpec",
    "PRESETS",
    "Preset",
    "UnknownPresetError",
    "World",
    "build_grid",
    "build_office_single_obs",
    "env_path",
    "format_env",
    "load_env",
    "observation_alphabet",
    "parse_env",
    "preset",
    "preset_spec",
    "save_env",
]
