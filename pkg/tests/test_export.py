"""Figure-data files: headers with units, float formatting and JSON layout."""
import json

import numpy as np
import pandas as pd
import pytest

import export
from state_model import Quadrature


class TestHeaders:

    def test_units(self):
        assert export.header('q') == 'q [sqrt(hbar)]'
        assert export.header('db') == 'db [dB]'
        assert export.header('kind') == 'kind'

    def test_axis_name(self):
        assert export.axis_name(Quadrature.POSITION) == 'q'
        assert export.axis_name('momentum') == 'p'

    @pytest.mark.parametrize("two_x, label", [(9, 'x+9_2'), (-8, 'x-4'), (0, 'x0'), (1, 'x+1_2')])
    def test_outcome_label(self, two_x, label):
        assert export.outcome_label(two_x) == label


class TestCsv:

    def test_samples_csv(self, tmp_path):
        frame = export.samples_frame(np.array([0.1, 0.5]), np.array([1 + 0j, 0.5j]), Quadrature.POSITION)
        path = export.write_frame(frame, tmp_path / 'wavefunction_J4_x+4_q')
        lines = path.read_text().splitlines()
        assert path.name == 'wavefunction_J4_x+4_q.csv'
        assert lines[0] == 'q [sqrt(hbar)],re [hbar^(-1/4)],im [hbar^(-1/4)],abs2 [hbar^(-1/2)]'
        assert lines[1].startswith('0.10000000000000001,1,0,1')
        assert len(lines) == 3

    def test_dotted_name_keeps_stem(self, tmp_path):
        frame = export.rows_frame([{'db': 7.5, 'j': 3.0}], ['db', 'j'])
        path = export.write_frame(frame, tmp_path / 'target_plus_7.5dB_q')
        assert path.name == 'target_plus_7.5dB_q.csv'

    def test_existing_suffix(self, tmp_path):
        frame = export.rows_frame([{'x': 1.0}], ['x'])
        assert export.write_frame(frame, tmp_path / 'out.csv').name == 'out.csv'

    def test_float_round_trip(self, tmp_path):
        value = 1 / 3
        frame = export.rows_frame([{'probability': value}], ['probability'])
        path = export.write_frame(frame, tmp_path / 'p')
        assert pd.read_csv(path).iloc[0, 0] == value


class TestJson:

    def test_rows_with_units(self, tmp_path):
        rows = [{'j': 0.5, 'p_exact': 1.0}, {'j': 1.0, 'p_exact': 0.75}]
        path = export.write_frame(export.rows_frame(rows, ['j', 'p_exact']), tmp_path / 'sweep', fmt='json')
        data = json.loads(path.read_text())
        assert path.suffix == '.json'
        assert data['units'] == {'j': '1', 'p_exact': '1'}
        assert data['rows'] == rows

    def test_numpy_values(self, tmp_path):
        path = export.write_json({'a': np.float64(0.25), 'b': np.arange(3)}, tmp_path / 'report.json')
        assert json.loads(path.read_text()) == {'a': 0.25, 'b': [0, 1, 2]}
