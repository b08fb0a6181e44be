import os
import sys
import argparse
from pathlib import Path

import yaml
from colorama import Fore, Style

# Configuration file path
CONFIG_FILE = Path("gesi-config.yaml")

# CLI exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant or precondition."""


class AudioIOError(OSError):
    """Raised when an audio, profile or manifest file cannot be read or written."""


def default_config() -> dict:
    return {
        "cache_folder": "cache log",
        "gesi": {
            "rho": 0.55,
            "eta": 0.7,
            "h_max": 5.0,
            "i_max": 85.0,
            "calib_spl": 120.0,
            "use_tmtf": True,
            "mfb_weights": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        },
        "filterbank": {
            "n_channels": 100,
            "f_min": 100.0,
            "f_max": 6000.0,
        },
        "enhance": {
            "sample_rate": 16000,
            "snr": 0.0,
        },
        "evaluate": {
            "workers": 4,
            "fit_subset": 5,
            "seed": 1,
            "repeats": 1,
            "fit_condition": None,
        },
    }


def load_config(config_file: Path = CONFIG_FILE) -> dict:
    """Load configuration from YAML file or create a default one if it doesn't exist."""
    defaults = default_config()

    if config_file.exists():
        with open(config_file, 'r') as f:
            config = yaml.safe_load(f) or {}
        # Ensure default keys exist, one level deep
        for key, value in defaults.items():
            if key not in config or config[key] is None:
                config[key] = value
            elif isinstance(value, dict):
                for sub_key, sub_value in value.items():
                    config[key].setdefault(sub_key, sub_value)
    else:
        config = defaults
        with open(config_file, 'w') as f:
            yaml.dump(config, f, default_flow_style=False, sort_keys=False)

    return config


def cache_dir(config: dict) -> Path:
    """Return the cache folder from the configuration, creating it if needed."""
    folder = Path(config.get("cache_folder", "cache log"))
    folder.mkdir(parents=True, exist_ok=True)
    return folder


def file_path(path: str) -> str:
    """Custom argparse type to validate existing files."""
    if os.path.isfile(path):
        return path
    raise argparse.ArgumentTypeError(f"'{path}' is not a file")


def float_list(value: str) -> list:
    """Custom argparse type for comma-separated floats, e.g. '-20,10'."""
    try:
        return [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not a comma-separated list of numbers")


def path_list(value: str) -> list:
    """Custom argparse type for comma-separated existing files."""
    paths = [v.strip() for v in value.split(',') if v.strip()]
    for path in paths:
        file_path(path)
    return paths


def info(message: str):
    print(f"{Fore.CYAN}[INFO]{Style.RESET_ALL} {message}", file=sys.stderr)


def warn(message: str):
    print(f"{Fore.YELLOW}[WARNING]{Style.RESET_ALL} {message}", file=sys.stderr)


def error(message: str):
    print(f"{Fore.RED}[ERROR]{Style.RESET_ALL} {message}", file=sys.stderr)
