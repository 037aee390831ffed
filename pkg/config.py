"""
Runtime configuration: environment (.env), flat key=value config files and logging.

Precedence is CLI flags > config file > built-in defaults.
"""
import os
import logging
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

from dotenv import load_dotenv, dotenv_values

from errors import ConfigError

# Load environment variables
load_dotenv()

OUTPUT_DIR = os.environ.get('GKP_OUTPUT_DIR', 'output')
LOG_LEVEL = os.environ.get('GKP_LOG_LEVEL', 'INFO')
LOG_FILE = os.environ.get('GKP_LOG_FILE', 'gkp_herald.log')
WORKERS = int(os.environ.get('GKP_WORKERS', '4'))

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Configure root logging once, with a file handler when a log file is set."""
    level_name = (level or LOG_LEVEL).upper()
    if not hasattr(logging, level_name):
        raise ConfigError(f"Unknown log level: {level_name}")

    handlers: List[logging.Handler] = [logging.StreamHandler()]
    path = LOG_FILE if log_file is None else log_file
    if path:
        handlers.append(logging.FileHandler(path))

    logging.basicConfig(
        level=getattr(logging, level_name),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


@dataclass
class RunConfig:
    """Merged parameters for one CLI command."""
    command: str = ''
    j: Optional[str] = None
    db: Optional[float] = None
    x: List[str] = field(default_factory=list)
    quadrature: str = 'position'
    target: Optional[str] = None
    q0: float = 0.0
    grid_min: Optional[float] = None
    grid_max: Optional[float] = None
    grid_step: Optional[float] = None
    sweep_db: Optional[str] = None
    sweep_j: Optional[str] = None
    faraday: bool = False
    n_photons: float = 1e4
    detuning: float = 500.0
    meter_variance: float = 0.1
    photon_flux: float = 1e6
    suite: List[str] = field(default_factory=list)
    max_j: Optional[float] = None
    out_dir: str = OUTPUT_DIR
    format: str = 'csv'
    workers: int = WORKERS

    def require_one_of_j_db(self):
        """Exactly one of J / dB must be given."""
        if (self.j is None) == (self.db is None):
            raise ConfigError("exactly one of --j / --db must be given")


_FLOAT_KEYS = {'db', 'q0', 'grid_min', 'grid_max', 'grid_step', 'n_photons',
               'detuning', 'meter_variance', 'photon_flux', 'max_j'}
_INT_KEYS = {'workers'}
_BOOL_KEYS = {'faraday'}
_LIST_KEYS = {'x', 'suite'}


def _coerce(key: str, value: str):
    """Convert a config-file string to the RunConfig field type."""
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _BOOL_KEYS:
            return value.strip().lower() in ('1', 'true', 'yes', 'on')
        if key in _LIST_KEYS:
            return [v.strip() for v in value.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(f"Invalid value for {key}: {value!r}")
    return value


def read_config_file(path: str) -> Dict[str, object]:
    """Read a flat key=value file (dotenv syntax) into typed RunConfig values."""
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")

    known = {f.name for f in fields(RunConfig)}
    values = {}
    for raw_key, raw_value in dotenv_values(path).items():
        key = raw_key.strip().lower().replace('-', '_')
        if key not in known or key == 'command':
            logging.getLogger(__name__).warning(f"Ignoring unknown config key: {raw_key}")
            continue
        if raw_value is None:
            continue
        values[key] = _coerce(key, raw_value)
    return values


def build_run_config(command: str, cli_values: Dict[str, object],
                     config_path: Optional[str] = None) -> RunConfig:
    """Merge defaults, config file and CLI flags (flags that were not given are None)."""
    merged = {}
    if config_path:
        merged.update(read_config_file(config_path))
    for key, value in cli_values.items():
        if value is None or value == []:
            continue
        merged[key] = value

    known = {f.name for f in fields(RunConfig)}
    config = RunConfig(command=command, **{k: v for k, v in merged.items() if k in known})
    if config.format not in ('csv', 'json'):
        raise ConfigError(f"Unsupported format: {config.format}")
    if config.workers < 1:
        raise ConfigError("workers must be at least 1")
    return config


def parse_range(text: str) -> List[float]:
    """Parse 'start:stop:step' (inclusive stop) into a list of floats."""
    parts = text.split(':')
    if len(parts) != 3:
        raise ConfigError(f"Range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"Range must be numeric, got {text!r}")
    if step <= 0 or stop < start:
        raise ConfigError(f"Empty or invalid range: {text!r}")

    count = int(round((stop - start) / step))
    values = [start + i * step for i in range(count + 1)]
    # drop a final point that overshoots stop due to rounding
    return [v for v in values if v <= stop + 1e-9 * max(1.0, abs(stop))]
