"""Command line: ``reconstruct``, ``verify``, ``example`` and ``classify``.

Exit codes: 0 ok, 1 verification failure, 2 usage or parse error, 3 numerical failure.
"""
import argparse
import copy
import json
import logging
import yaml
from dataclasses import dataclass, field
from os import path as osp
from typing import Optional

from helixrec.errors import ClassificationError, ConfigError, HelixrecError, VerificationError
from helixrec.frenet import canonical_initial_state, identity_initial_state, integrate_frenet
from helixrec.helix import EXAMPLE_CURVES, example_curve, solve_general_helix
from helixrec.intrinsics import IntrinsicProfile, classify, evaluate_constant, load_profile_table
from helixrec.sample_io import FORMATS, read_sample, sample_profile, write_sample
from helixrec.utils import DEFAULT_OPTIONS, load_options
from helixrec.verify import full_report
from helixrec.version import __version__

__all__ = [
    'METHODS', 'RunConfig', 'build_parser', 'cmd_reconstruct', 'cmd_verify', 'cmd_example', 'cmd_classify', 'main'
]

METHODS = ('auto', 'helix', 'frenet')

logger = logging.getLogger(__name__)


def _constant(text, what):
    try:
        return evaluate_constant(text)
    except HelixrecError as err:
        raise ConfigError(f'{what}: {err}') from err


def _parse_params(items):
    params = {}
    for item in items or []:
        name, sep, value = item.partition('=')
        name = name.strip()
        if not sep or not name.isidentifier():
            raise ConfigError(f'parameters are given as name=value, got {item!r}')
        params[name] = _constant(value, f'parameter {name}')
    return params


@dataclass
class RunConfig:
    """Everything one command needs, built from the parsed arguments and the merged options.

    Args:
        command (str): ``reconstruct``, ``verify``, ``example`` or ``classify``.
        kappa, tau (str | None): Expression texts.
        table (str | None): CSV with columns ``s,kappa,tau``, used instead of expressions.
        params (dict): Parameter values.
        s0, s1 (float | None): Domain.
        n (int): Sample points.
        method (str): ``auto``, ``helix`` or ``frenet``.
        output (str | None): Output path.
        fmt (str | None): ``csv`` or ``json``; None means by extension, then the ``output.format`` option.
        options (dict): Nested tolerances and settings, see :data:`helixrec.utils.DEFAULT_OPTIONS`.
    """
    command: str
    kappa: Optional[str] = None
    tau: Optional[str] = None
    table: Optional[str] = None
    params: dict = field(default_factory=dict)
    s0: Optional[float] = None
    s1: Optional[float] = None
    n: int = 1001
    method: str = 'auto'
    output: Optional[str] = None
    fmt: Optional[str] = None
    kind: Optional[str] = None
    input: Optional[str] = None
    report: Optional[str] = None
    progress: bool = False
    options: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_OPTIONS))

    @classmethod
    def from_args(cls, args):
        overrides = {}
        if getattr(args, 'tol', None) is not None:
            overrides.setdefault('classify', {})['tol'] = args.tol
        if getattr(args, 'grid_n', None) is not None:
            overrides.setdefault('classify', {})['grid_n'] = args.grid_n
        try:
            options = load_options(args.config, overrides)
        except (OSError, ValueError, yaml.YAMLError) as err:
            raise ConfigError(f'cannot load options: {err}') from err

        params = _parse_params(getattr(args, 'param', None))
        for name in ('a', 'alpha'):
            value = getattr(args, name, None)
            if value is not None:
                params[name] = _constant(value, f'--{name}')
        s0 = getattr(args, 's0', None)
        s1 = getattr(args, 's1', None)
        return cls(
            command=args.command,
            kappa=getattr(args, 'kappa', None),
            tau=getattr(args, 'tau', None),
            table=getattr(args, 'table', None),
            params=params,
            s0=None if s0 is None else _constant(s0, '--s0'),
            s1=None if s1 is None else _constant(s1, '--s1'),
            n=getattr(args, 'n', 1001),
            method=getattr(args, 'method', 'auto'),
            output=getattr(args, 'output', None),
            fmt=getattr(args, 'format', None),
            kind=getattr(args, 'kind', None),
            input=getattr(args, 'input', None),
            report=getattr(args, 'report', None),
            progress=getattr(args, 'progress', False),
            options=options)

    def validate(self, curve_class=None):
        """Check the configuration; with ``curve_class`` also check that the method suits the profile.

        Raises:
            ConfigError: Inconsistent flags.
            ClassificationError: ``method=helix`` for a Generic profile.
        """
        if self.command in ('reconstruct', 'classify'):
            if self.table is None and (self.kappa is None or self.tau is None):
                raise ConfigError('give --kappa and --tau, or --table')
            if self.table is not None and (self.kappa is not None or self.tau is not None):
                raise ConfigError('--table replaces --kappa/--tau; give one or the other')
            if self.table is None and (self.s0 is None or self.s1 is None):
                raise ConfigError('--s0 and --s1 are required with expression profiles')
        if self.s0 is not None and self.s1 is not None and not self.s0 < self.s1:
            raise ConfigError(f'domain must satisfy s0 < s1, got [{self.s0}, {self.s1}]')
        if self.n < 2:
            raise ConfigError(f'--n must be at least 2, got {self.n}')
        if self.method not in METHODS:
            raise ConfigError(f'unknown method {self.method!r}; choose from {", ".join(METHODS)}')
        if self.fmt is not None and self.fmt not in FORMATS:
            raise ConfigError(f'unknown format {self.fmt!r}; choose from {", ".join(FORMATS)}')
        if curve_class is not None and self.method == 'helix' and not curve_class.is_helix:
            raise ClassificationError('profile is Generic; the helix method is inapplicable')
        return self

    def build_profile(self):
        if self.table is not None:
            return load_profile_table(self.table, self.s0, self.s1)
        return IntrinsicProfile.from_text(self.kappa, self.tau, self.s0, self.s1, self.params)

    def output_format(self, path):
        if self.fmt is not None:
            return self.fmt
        if osp.splitext(path)[1].lower() == '.json':
            return 'json'
        return self.options['output']['format']

    def output_path(self, default_stem):
        if self.output is not None:
            return self.output
        ext = self.fmt or self.options['output']['format']
        return f'{default_stem}.{ext}'

    def example_domain(self):
        if self.s0 is None and self.s1 is None:
            return None
        lo, hi = EXAMPLE_CURVES[self.kind].default_domain
        return (lo if self.s0 is None else self.s0, hi if self.s1 is None else self.s1)


def cmd_reconstruct(config):
    """Reconstruct a curve from its intrinsic equations and write the sample file."""
    opt = config.options
    profile = config.build_profile()
    curve_class = classify(profile, opt['classify']['grid_n'], opt['classify']['tol'])
    config.validate(curve_class)
    method = config.method
    if method == 'auto':
        method = 'helix' if curve_class.is_helix else 'frenet'
    if method == 'helix':
        sample = solve_general_helix(
            profile,
            n=config.n,
            tol=opt['quadrature']['tol'],
            max_depth=opt['quadrature']['max_depth'],
            class_tol=opt['classify']['tol'],
            grid_n=opt['classify']['grid_n'],
            progress=config.progress)
    else:
        if curve_class.is_helix:
            init = canonical_initial_state(curve_class.alpha, profile.s0)
        else:
            init = identity_initial_state(profile.s0)
        sample = integrate_frenet(
            profile,
            init,
            profile.length / (config.n - 1),
            config.n - 1,
            curvature_floor=opt['frenet']['curvature_floor'],
            repair_tol=opt['frenet']['repair_tol'],
            alpha=curve_class.alpha,
            progress=config.progress)
    path = config.output_path('curve')
    write_sample(sample, path, config.output_format(path))
    alpha = 'none' if curve_class.alpha is None else f'{curve_class.alpha:.12g}'
    print(f'class={curve_class.kind.value} alpha={alpha} method={sample.method.value} points={len(sample)} '
          f'max_speed_deviation={sample.speed_deviation():.3e} output={path}')
    return 0


def cmd_verify(config):
    """Verify a sample file; the report goes to ``--report`` or stdout as JSON."""
    sample = read_sample(config.input, config.fmt)
    if len(sample) < 7:
        raise VerificationError(f'too few points: {len(sample)} < 7')
    report = full_report(sample, sample_profile(sample), config.options)
    text = json.dumps(report.to_dict(), indent=2)
    if config.report is not None:
        with open(config.report, 'w') as fout:
            fout.write(text + '\n')
    else:
        print(text)
    if not report.passed:
        for failure in report.failures:
            logger.warning(f'{failure["check"]} failed: {failure["reason"]}')
        return 1
    logger.info(f'{config.input}: all checks passed')
    return 0


def cmd_example(config):
    """Write one of the closed-form example curves."""
    if config.kind not in EXAMPLE_CURVES:
        raise ConfigError(f'unknown example {config.kind!r}; choose from {", ".join(sorted(EXAMPLE_CURVES))}')
    sample = example_curve(config.kind, config.params, config.example_domain(), config.n)
    path = config.output_path(config.kind)
    write_sample(sample, path, config.output_format(path))
    print(f'example={config.kind} points={len(sample)} output={path}')
    return 0


def cmd_classify(config):
    opt = config.options
    print(classify(config.build_profile(), opt['classify']['grid_n'], opt['classify']['tol']))
    return 0


COMMANDS = {
    'reconstruct': cmd_reconstruct,
    'verify': cmd_verify,
    'example': cmd_example,
    'classify': cmd_classify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='YAML option file merged over the defaults')
    common.add_argument('--verbose', action='store_true', help='Log at debug level')
    common.add_argument('--log-file', default=None, help='Also log to this file')

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument('--kappa', help='Curvature expression in s, e.g. "sin(alpha)/(a*s)"')
    profile.add_argument('--tau', help='Torsion expression in s')
    profile.add_argument('--table', help='CSV with columns s,kappa,tau instead of expressions')
    profile.add_argument('-p', '--param', action='append', metavar='NAME=VALUE', help='Parameter, e.g. alpha=pi/3')
    profile.add_argument('--s0', help='Domain start (expressions like pi/2 allowed)')
    profile.add_argument('--s1', help='Domain end')

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument('--n', type=int, default=1001, help='Sample points. Default: 1001')
    output.add_argument('-o', '--output', default=None, help='Output file')
    output.add_argument('--format', choices=FORMATS, default=None, help='Output format. Default: by extension')

    parser = argparse.ArgumentParser(
        prog='helixrec', description='Reconstruct space curves from curvature and torsion, and verify them.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    rec = sub.add_parser('reconstruct', parents=[common, profile, output], help='Reconstruct a curve')
    rec.add_argument('--method', choices=METHODS, default='auto', help='Solver. Default: auto')
    rec.add_argument('--progress', action='store_true', help='Show progress bars')

    ver = sub.add_parser('verify', parents=[common], help='Verify a sample file')
    ver.add_argument('input', help='Sample file (CSV or JSON)')
    ver.add_argument('--format', choices=FORMATS, default=None, help='Input format. Default: by extension')
    ver.add_argument('--report', default=None, help='Write the JSON report here instead of stdout')

    ex = sub.add_parser('example', parents=[common, output], help='Write a closed-form example curve')
    ex.add_argument('kind', choices=sorted(EXAMPLE_CURVES), help='Example curve')
    ex.add_argument('--a', default=None, help='Scale parameter a')
    ex.add_argument('--alpha', default=None, help='Helix angle, e.g. pi/3')
    ex.add_argument('-p', '--param', action='append', metavar='NAME=VALUE', help='Further parameters')
    ex.add_argument('--s0', help='Domain start. Default: the example\'s own domain')
    ex.add_argument('--s1', help='Domain end')

    cls = sub.add_parser('classify', parents=[common, profile], help='Print the curve class of a profile')
    cls.add_argument('--tol', type=float, default=None, help='Relative tolerance. Default: 1e-9')
    cls.add_argument('--grid-n', type=int, default=None, help='Grid points. Default: 256')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = [logging.StreamHandler()]
    if args.log_file is not None:
        handlers.append(logging.FileHandler(args.log_file, 'a'))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s: %(message)s',
        handlers=handlers,
        force=True)
    try:
        config = RunConfig.from_args(args).validate()
        return COMMANDS[config.command](config)
    except HelixrecError as err:
        logger.error(f'{args.command}: {err}')
        return err.exit_code
    except OSError as err:
        logger.error(f'{args.command}: {err}')
        return 2
    finally:
        # the handlers hold this run's stderr and log file
        root = logging.getLogger()
        for handler in handlers:
            root.removeHandler(handler)
            handler.close()
