import json
import logging
import re
from pathlib import Path

import numpy as np
import pandas as pd

from .classes.NoiseSpec import NoiseSpec
from .classes.SegmentProfile import SegmentProfile, SampledCurrent
from .exceptions import ConfigurationError, FormatError, ParseError

logger = logging.getLogger(__name__)

CURRENT_LOG_COLUMNS = ['t_s', 'i_a']
SEGMENT_COLUMNS = ['duration_s', 'amps']
UNIFORM_SPACING_RTOL = 1e-6
FLOAT_FORMAT = '%.17g'


def _read_table(file_path, columns):
    try:
        df = pd.read_csv(file_path, encoding='utf-8-sig', dtype=str, skip_blank_lines=False, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise FormatError(f"{file_path} is empty; expected the header `{','.join(columns)}`")
    except pd.errors.ParserError as error:
        match = re.search(r'line (\d+)', str(error))
        raise ParseError(f"malformed row in {file_path}: {error}",
                         line_number=int(match.group(1)) if match else None)
    header = [str(column).strip() for column in df.columns]
    if header != columns:
        raise FormatError(f"{file_path} has the header {header}, expected {columns}")
    df.columns = header
    numeric = df.apply(lambda column: pd.to_numeric(column.str.strip(), errors='coerce'))
    bad = ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        # header is line 1
        raise ParseError(f"expected {len(columns)} finite numbers in {file_path}, got {df.iloc[row].tolist()}",
                         line_number=row + 2)
    return numeric


def load_csv(file_path):
    """
    Read a current log with the header `t_s,i_a` into a `SampledCurrent`.

    Timestamps must be strictly increasing and uniformly spaced within a relative tolerance of 1e-6; the sample
    period is the mean spacing. Currents are taken as instantaneous samples.

    :param file_path: [string] Path to the CSV file (UTF-8, LF or CRLF line endings).
    :return: [SampledCurrent]
    """
    df = _read_table(file_path, CURRENT_LOG_COLUMNS)
    if len(df) < 2:
        raise FormatError(f"{file_path} needs at least two samples, got {len(df)}")
    times = df['t_s'].to_numpy()
    spacing = np.diff(times)
    if np.any(spacing <= 0):
        row = int(np.flatnonzero(spacing <= 0)[0])
        raise FormatError(f"Timestamps in {file_path} are not strictly increasing at line {row + 3}")
    delta = (times[-1] - times[0]) / (len(times) - 1)
    if np.any(np.abs(spacing - delta) > UNIFORM_SPACING_RTOL * delta):
        row = int(np.flatnonzero(np.abs(spacing - delta) > UNIFORM_SPACING_RTOL * delta)[0])
        raise FormatError(f"Timestamps in {file_path} are not uniformly spaced (period {delta} s) at line {row + 3}")
    logger.info("Read " + str(len(df)) + " current samples at " + str(delta) + " s from " + str(file_path))
    return SampledCurrent(delta, df['i_a'].to_numpy())


def save_current_log(sc, file_path):
    sc.to_frame().to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info("Wrote " + str(len(sc)) + " current samples to " + str(file_path))


def load_segments(file_path):
    """
    Read a segment profile with the header `duration_s,amps`.

    :return: [SegmentProfile]
    """
    df = _read_table(file_path, SEGMENT_COLUMNS)
    if len(df) == 0:
        raise FormatError(f"{file_path} holds no segments")
    if np.any(df['duration_s'].to_numpy() <= 0):
        row = int(np.flatnonzero(df['duration_s'].to_numpy() <= 0)[0])
        raise ParseError(f"segment durations in {file_path} must be > 0", line_number=row + 2)
    return SegmentProfile(df['duration_s'].to_numpy(), df['amps'].to_numpy())


def save_segments(profile, file_path):
    profile.to_frame().to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info("Wrote " + str(len(profile)) + " segments to " + str(file_path))


def read_json(file_path):
    try:
        with open(file_path, encoding='utf-8') as handle:
            document = json.load(handle)
    except json.JSONDecodeError as error:
        raise ConfigurationError(f"{file_path} is not valid JSON: {error}")
    if not isinstance(document, dict):
        raise ConfigurationError(f"{file_path} must hold a JSON object")
    return document


def write_json(document, file_path):
    with open(file_path, 'w', encoding='utf-8', newline='\n') as handle:
        json.dump(document, handle, sort_keys=True, indent=2, default=_json_default)
        handle.write('\n')


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def read_noise_spec(file_path):
    """
    Read a `NoiseSpec` JSON document; absent fields are left unset, unknown fields are an error.
    """
    return NoiseSpec.from_dict(read_json(file_path))


def write_noise_spec(spec, file_path):
    write_json(spec.to_dict(), file_path)


def sidecar_path(file_path):
    """`results/mc.csv` -> `results/mc.meta.json`."""
    file_path = Path(file_path)
    return file_path.with_name(file_path.stem + '.meta.json')


def write_frame(frame, file_path, metadata):
    """
    Write a result table as CSV with full float precision, together with its JSON metadata sidecar.

    :param frame: [pandas.DataFrame]
    :param file_path: [string or Path] The CSV path.
    :param metadata: [dict] Resolved configuration, seed, version and result summary.
    :return: [Path] The sidecar path.
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    sidecar = sidecar_path(file_path)
    write_json(metadata, sidecar)
    logger.info("Wrote " + str(len(frame)) + " rows to " + str(file_path) + " (metadata in " + str(sidecar) + ")")
    return sidecar
