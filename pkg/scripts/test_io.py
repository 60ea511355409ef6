"""
Tests for reading and writing current logs, segment profiles, noise specifications and result tables.
"""
import json

import numpy as np
import pandas as pd
import pytest

from pysocerr.classes import NoiseSpec, SampledCurrent
from pysocerr.exceptions import ConfigurationError, FormatError, ParseError
from pysocerr.io import (load_csv, load_segments, read_json, read_noise_spec, save_current_log, save_segments,
                         sidecar_path, write_frame, write_noise_spec)
from pysocerr.profiles import generate_profile


def _write(path, text):
    path.write_bytes(text.encode('utf-8'))
    return path


class TestCurrentLog:

    def test_crlf_and_bom(self, tmp_path):
        path = _write(tmp_path / 'log.csv', '\ufefft_s,i_a\r\n0.5,0.25\r\n1.0,-0.5\r\n1.5,1.0\r\n')
        sc = load_csv(path)
        assert sc.delta == pytest.approx(0.5)
        np.testing.assert_array_equal(sc.samples, [0.25, -0.5, 1.0])

    def test_round_trip(self, tmp_path):
        sc = SampledCurrent(0.1, np.sin(np.arange(50)))
        save_current_log(sc, tmp_path / 'log.csv')
        loaded = load_csv(tmp_path / 'log.csv')
        np.testing.assert_array_equal(loaded.samples, sc.samples)
        assert loaded.delta == pytest.approx(0.1, rel=1e-12)

    def test_wrong_header(self, tmp_path):
        with pytest.raises(FormatError):
            load_csv(_write(tmp_path / 'log.csv', 'time,current\n1,2\n2,3\n'))

    def test_empty_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_csv(_write(tmp_path / 'log.csv', ''))

    def test_bad_value_line_number(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path / 'log.csv', 't_s,i_a\n1,0.5\n2,abc\n3,1\n'))
        assert info.value.line_number == 3
        assert str(info.value).startswith('line 3:')

    def test_extra_field_line_number(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_csv(_write(tmp_path / 'log.csv', 't_s,i_a\n1,0.5\n2,1,3\n'))
        assert info.value.line_number == 3

    @pytest.mark.parametrize('rows', ['1,0\n2,0\n2,0\n', '2,0\n1,0\n', '1,0\n2,0\n4,0\n', '1,0\n'])
    def test_timestamps(self, tmp_path, rows):
        with pytest.raises(FormatError):
            load_csv(_write(tmp_path / 'log.csv', 't_s,i_a\n' + rows))


class TestSegments:

    def test_round_trip(self, tmp_path):
        profile = generate_profile(25, (-2.0, 2.0), (0.1, 5.0), seed=6)
        save_segments(profile, tmp_path / 'profile.csv')
        assert load_segments(tmp_path / 'profile.csv') == profile

    def test_non_positive_duration(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_segments(_write(tmp_path / 'profile.csv', 'duration_s,amps\n10,1\n0,2\n'))
        assert info.value.line_number == 3

    def test_no_segments(self, tmp_path):
        with pytest.raises(FormatError):
            load_segments(_write(tmp_path / 'profile.csv', 'duration_s,amps\n'))


class TestJson:

    def test_noise_spec_round_trip(self, tmp_path):
        spec = NoiseSpec(sigma_i=0.01, sigma_batt=0.1, rho_delta_fixed=6.9444e-5, seed=7)
        write_noise_spec(spec, tmp_path / 'noise.json')
        assert read_noise_spec(tmp_path / 'noise.json') == spec
        assert 'sigma_l' not in json.loads((tmp_path / 'noise.json').read_text())

    def test_unknown_field(self, tmp_path):
        with pytest.raises(ConfigurationError):
            read_noise_spec(_write(tmp_path / 'noise.json', '{"sigma_i": 0.01, "sigma_z": 0.1}'))

    def test_invalid_json(self, tmp_path):
        with pytest.raises(ConfigurationError):
            read_json(_write(tmp_path / 'noise.json', '{"sigma_i": '))
        with pytest.raises(ConfigurationError):
            read_json(_write(tmp_path / 'noise.json', '[1, 2]'))


def test_write_frame(tmp_path):
    frame = pd.DataFrame({'k': [1, 2], 'value': [0.1, 1 / 3]})
    sidecar = write_frame(frame, tmp_path / 'out' / 'table.csv', {'seed': np.int64(3), 'curve': np.ones(2)})
    assert sidecar == sidecar_path(tmp_path / 'out' / 'table.csv')
    assert sidecar.name == 'table.meta.json'
    assert json.loads(sidecar.read_text()) == {'curve': [1.0, 1.0], 'seed': 3}
    assert pd.read_csv(tmp_path / 'out' / 'table.csv')['value'].iloc[1] == 1 / 3
