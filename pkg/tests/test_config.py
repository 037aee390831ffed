"""Config file parsing, precedence and sweep ranges."""
import logging

import pytest

import config
from config import RunConfig, build_run_config, parse_range, read_config_file
from errors import ConfigError


class TestParseRange:

    def test_inclusive_stop(self):
        assert parse_range('0:1:0.25') == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_sweep_db_points(self):
        assert len(parse_range('0:25:0.5')) == 51

    def test_single_point(self):
        assert parse_range('3:3:1') == [3.0]

    @pytest.mark.parametrize("text", ['0:1', 'a:b:c', '0:1:0', '2:1:0.5', '0:1:-1'])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_range(text)


class TestConfigFile:

    def test_typed_values(self, tmp_path):
        path = tmp_path / 'run.env'
        path.write_text('max_j=10\ndb=15\nx=+J,-J\nfaraday=yes\nworkers=2\nmeter_variance=0.05\n')
        values = read_config_file(str(path))
        assert values == {'max_j': 10.0, 'db': 15.0, 'x': ['+J', '-J'], 'faraday': True,
                          'workers': 2, 'meter_variance': 0.05}

    def test_unknown_keys_ignored(self, tmp_path, caplog):
        path = tmp_path / 'run.env'
        path.write_text('colour=blue\nj=4\n')
        with caplog.at_level(logging.WARNING):
            values = read_config_file(str(path))
        assert values == {'j': '4'}
        assert 'colour' in caplog.text

    def test_bad_number(self, tmp_path):
        path = tmp_path / 'run.env'
        path.write_text('db=loud\n')
        with pytest.raises(ConfigError):
            read_config_file(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(str(tmp_path / 'absent.env'))


class TestRunConfig:

    def test_defaults(self):
        cfg = build_run_config('requirements', {})
        assert cfg.n_photons == 1e4
        assert cfg.detuning == 500.0
        assert cfg.format == 'csv'
        assert cfg.out_dir == config.OUTPUT_DIR

    def test_cli_overrides_file(self, tmp_path):
        path = tmp_path / 'run.env'
        path.write_text('db=15\nformat=json\n')
        cfg = build_run_config('wavefunction', {'db': 10.0, 'format': None, 'x': []}, str(path))
        assert cfg.db == 10.0
        assert cfg.format == 'json'
        assert cfg.x == []

    def test_invalid_format(self):
        with pytest.raises(ConfigError):
            build_run_config('probability', {'format': 'xlsx'})

    def test_invalid_workers(self):
        with pytest.raises(ConfigError):
            build_run_config('probability', {'workers': 0})

    def test_exactly_one_of_j_db(self):
        with pytest.raises(ConfigError):
            RunConfig(j='4', db=10.0).require_one_of_j_db()
        with pytest.raises(ConfigError):
            RunConfig().require_one_of_j_db()
        RunConfig(j='4').require_one_of_j_db()


class TestLogging:

    def test_unknown_level(self):
        with pytest.raises(ConfigError):
            config.setup_logging('CHATTY', log_file='')

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / 'run.log'
        config.setup_logging('INFO', log_file=str(log_file))
        logging.getLogger('test_config').info('hello')
        root = logging.getLogger()
        for handler in list(root.handlers):
            handler.flush()
            if isinstance(handler, logging.FileHandler):
                handler.close()
                root.removeHandler(handler)
        assert 'INFO - hello' in log_file.read_text()
