"""Reading and writing curve samples.

CSV layout::

    # profile: kappa=<text> tau=<text> params=<k=v,...> alpha=<value|none> method=<tag> h=<step>
    s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz
    <rows, 17 significant digits>

JSON holds the same metadata under ``profile``, ``alpha``, ``method`` and ``h``, plus ``columns`` and ``rows``.
"""
import json
import numpy as np
import re
from os import path as osp

from helixrec.errors import SampleFormatError
from helixrec.frenet import CurveSample, Method
from helixrec.intrinsics import profile_from_provenance

__all__ = [
    'COLUMNS', 'sample_format', 'format_params', 'parse_params', 'header_line', 'parse_header', 'write_sample',
    'read_sample', 'sample_profile'
]

COLUMNS = ('s', 'x', 'y', 'z', 'Tx', 'Ty', 'Tz', 'Nx', 'Ny', 'Nz', 'Bx', 'By', 'Bz')
FORMATS = ('csv', 'json')

_HEADER_RE = re.compile(r'^# profile: kappa=(?P<kappa>\S+) tau=(?P<tau>\S+) params=(?P<params>\S*) '
                        r'alpha=(?P<alpha>\S+) method=(?P<method>\S+) h=(?P<h>\S+)$')


def _number(value):
    return format(float(value), '.17g')


def sample_format(path, fmt=None):
    """``fmt`` if given, else ``json`` for a ``.json`` path and ``csv`` otherwise."""
    if fmt is None:
        fmt = 'json' if osp.splitext(path)[1].lower() == '.json' else 'csv'
    if fmt not in FORMATS:
        raise SampleFormatError(f'unknown sample format {fmt!r}; choose from {", ".join(FORMATS)}')
    return fmt


def format_params(params):
    return ','.join(f'{name}={_number(value)}' for name, value in sorted(params.items()))


def parse_params(text):
    params = {}
    for item in filter(None, text.split(',')):
        name, sep, value = item.partition('=')
        if not sep or not name:
            raise SampleFormatError(f'malformed parameter {item!r} in header')
        try:
            params[name] = float(value)
        except ValueError:
            raise SampleFormatError(f'parameter {name!r} has a non-numeric value {value!r}') from None
    return params


def header_line(sample):
    prov = sample.provenance
    alpha = 'none' if sample.alpha is None else _number(sample.alpha)
    return (f'# profile: kappa={prov["kappa"]} tau={prov["tau"]} params={format_params(prov["params"])} '
            f'alpha={alpha} method={sample.method.value} h={_number(sample.h)}')


def parse_header(line):
    """Metadata dict with ``kappa``, ``tau``, ``params``, ``alpha``, ``method`` and ``h``."""
    match = _HEADER_RE.match(line.rstrip('\r\n'))
    if match is None:
        raise SampleFormatError('missing or malformed "# profile:" metadata line')
    meta = match.groupdict()
    meta['params'] = parse_params(meta['params'])
    try:
        meta['alpha'] = None if meta['alpha'] == 'none' else float(meta['alpha'])
        meta['h'] = float(meta['h'])
        meta['method'] = Method(meta['method'])
    except ValueError as err:
        raise SampleFormatError(f'malformed metadata: {err}') from err
    return meta


def _rows(sample):
    return np.column_stack([sample.s, sample.psi, sample.T, sample.N, sample.B])


def _from_rows(data, meta):
    data = np.asarray(data, dtype=float).reshape(-1, len(COLUMNS))
    provenance = {'kappa': meta['kappa'], 'tau': meta['tau'], 'params': dict(sorted(meta['params'].items()))}
    return CurveSample(data[:, 0], data[:, 1:4], data[:, 4:7], data[:, 7:10], data[:, 10:13], provenance,
                       meta['method'], meta['alpha'])


def write_sample(sample, path, fmt=None):
    """Write ``sample`` as CSV or JSON (chosen by ``fmt`` or the file extension)."""
    fmt = sample_format(path, fmt)
    if fmt == 'csv':
        with open(path, 'w', newline='\n') as fout:
            fout.write(header_line(sample) + '\n')
            fout.write(','.join(COLUMNS) + '\n')
            for row in _rows(sample):
                fout.write(','.join(_number(v) for v in row) + '\n')
        return path
    prov = sample.provenance
    document = {
        'profile': {
            'kappa': prov['kappa'],
            'tau': prov['tau'],
            'params': dict(sorted(prov['params'].items()))
        },
        'alpha': sample.alpha,
        'method': sample.method.value,
        'h': sample.h if len(sample) >= 2 else None,
        'columns': list(COLUMNS),
        'rows': _rows(sample).tolist(),
    }
    with open(path, 'w') as fout:
        json.dump(document, fout, indent=1)
        fout.write('\n')
    return path


def _read_csv(path):
    with open(path, 'r') as fin:
        lines = fin.read().splitlines()
    if not lines:
        raise SampleFormatError(f'{path}: empty file')
    meta = parse_header(lines[0])
    if len(lines) < 2 or lines[1].strip() != ','.join(COLUMNS):
        raise SampleFormatError(f'{path}: expected column header {",".join(COLUMNS)}')
    body = [line for line in lines[2:] if line.strip()]
    try:
        data = np.loadtxt(body, delimiter=',', ndmin=2) if body else np.empty((0, len(COLUMNS)))
    except ValueError as err:
        raise SampleFormatError(f'{path}: {err}') from err
    if data.shape[1] != len(COLUMNS):
        raise SampleFormatError(f'{path}: rows need {len(COLUMNS)} columns, got {data.shape[1]}')
    return _from_rows(data, meta)


def _read_json(path):
    try:
        with open(path, 'r') as fin:
            document = json.load(fin)
        profile = document['profile']
        meta = {
            'kappa': profile['kappa'],
            'tau': profile['tau'],
            'params': {str(k): float(v)
                       for k, v in profile.get('params', {}).items()},
            'alpha': None if document.get('alpha') is None else float(document['alpha']),
            'method': Method(document['method']),
        }
        columns = tuple(document.get('columns', COLUMNS))
        rows = document['rows']
    except (ValueError, KeyError, TypeError) as err:
        raise SampleFormatError(f'{path}: malformed sample document ({err})') from err
    if columns != COLUMNS:
        raise SampleFormatError(f'{path}: expected columns {list(COLUMNS)}')
    return _from_rows(rows, meta)


def read_sample(path, fmt=None):
    """Read a sample written by :func:`write_sample`.

    Raises:
        SampleFormatError: Missing metadata, wrong columns, unparsable numbers or an invalid grid (e.g. s not
            increasing).
    """
    if sample_format(path, fmt) == 'json':
        return _read_json(path)
    return _read_csv(path)


def sample_profile(sample):
    """Rebuild the intrinsic profile a sample records, over the sample's own range."""
    if len(sample) < 2:
        raise SampleFormatError(f'a sample needs at least 2 rows to define a domain, got {len(sample)}')
    prov = sample.provenance
    return profile_from_provenance(prov['kappa'], prov['tau'], float(sample.s[0]), float(sample.s[-1]), prov['params'])
