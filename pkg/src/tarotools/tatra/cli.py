"""
Command line interface.

    tatra [-C CONFIG | --min-config] [--set KEY=VALUE]... [--log-level LEVEL] [--max-degree N] VERB ...

Verbs: build, verify, tensor, groups, report, batch.
Exit codes: 0 success, 1 failed verification, 2 bad parameters or size limit, 3 I/O failure.
"""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import tarotools.tatra
from tarotools.tatra import autiso, cfg, log as tatra_log, util
from tarotools.tatra.cfg import LogMode
from tarotools.tatra.coco import dumps_matrix, intersection_tensor
from tarotools.tatra.common import ConfigFileNotFoundError, InadmissibleParametersError, SizeLimitExceededError, \
    TatraException, VerificationError
from tarotools.tatra.field import coset_structure, field_of_order
from tarotools.tatra.scheme import TatraScheme, build_tatra, verify_structure
from tarotools.tatra.separability import separability_verdict
from tarotools.tatra.util.attr import get_module_attributes, set_module_attributes

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_BAD_PARAMETERS = 2
EXIT_IO = 3


@dataclass(frozen=True)
class InstanceSpec:
    q: int
    n: int

    def check(self) -> 'InstanceSpec':
        """
        Raises:
            InadmissibleParametersError: (q, n) does not define a Tatra scheme
        """
        coset_structure(field_of_order(self.q), self.n)
        return self

    @classmethod
    def parse(cls, line: str) -> 'InstanceSpec':
        parts = line.split()
        if len(parts) != 2 or not all(p.lstrip('-').isdigit() for p in parts):
            raise InadmissibleParametersError(f"Expected a `q n` pair, got: {line!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self):
        return f"X({self.q},{self.n})"


def parse_batch(text: str) -> List[InstanceSpec]:
    """One `q n` pair per line; '#' starts a comment."""
    specs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = util.strip_comment(raw)
        if not line:
            continue
        try:
            specs.append(InstanceSpec.parse(line))
        except InadmissibleParametersError as e:
            raise InadmissibleParametersError(f"line {lineno}: {e}") from None
    return specs


def cmd_build(spec: InstanceSpec, out_dir=None) -> List[Path]:
    x = build_tatra(spec.q, spec.n)
    out_dir = Path(out_dir or '.')
    stem = f"tatra_{spec.q}_{spec.n}"
    matrix_file = util.write_text_file(out_dir / f"{stem}.matrix", dumps_matrix(x.config))
    labels_file = util.write_json_file(out_dir / f"{stem}.labels.json", x.label_map())
    log.info(f"event=[scheme_written] scheme=[{x!r}] matrix=[{matrix_file}] labels=[{labels_file}]")
    return [matrix_file, labels_file]


def cmd_verify(spec: InstanceSpec, *, scheme: Optional[TatraScheme] = None) -> Dict[str, Any]:
    """
    Structure, schurity, relation images and group orders of X(q, n). `scheme` replaces the built scheme
    (used to inject a modified color matrix).

    Raises:
        VerificationError: first failing check
    """
    x = scheme if scheme is not None else build_tatra(spec.q, spec.n)
    report = verify_structure(x).to_json()

    if x.degree <= cfg.schurity_max_degree:
        if not autiso.schurity_check(x):
            raise VerificationError('schurity', "orbits of Aut(X) on pairs differ from the relations",
                                    {'q': x.q, 'n': x.n})
        report['schurian'] = True
    else:
        report['schurian'] = None

    report['relation_images_checked'] = autiso.check_relation_images(x)
    ratio = autiso.induced_ratio(x)
    report.update({
        'aut_order': autiso.automorphism_group(x).order(),
        'iso_order': autiso.isomorphism_group(x).order(),
        'alg_aut_count': ratio.alg_aut_count,
        'induced_count': ratio.induced_count,
        'ratio': ratio.ratio,
    })
    return report


def cmd_tensor(spec: InstanceSpec) -> Dict[str, Any]:
    x = build_tatra(spec.q, spec.n)
    payload = intersection_tensor(x.config).to_json()
    payload.update({'q': x.q, 'n': x.n, 'labels': x.label_map()})
    return payload


def cmd_groups(spec: InstanceSpec) -> Dict[str, Any]:
    return autiso.groups_report(build_tatra(spec.q, spec.n))


def cmd_report(spec: InstanceSpec, all_alpha: Optional[bool] = None):
    return separability_verdict(spec.q, spec.n, all_alpha=all_alpha)


def _exit_code_of(e: BaseException) -> int:
    if isinstance(e, VerificationError):
        return EXIT_VERIFICATION_FAILED
    if isinstance(e, (InadmissibleParametersError, SizeLimitExceededError)):
        return EXIT_BAD_PARAMETERS
    if isinstance(e, OSError):
        return EXIT_IO
    raise e


def run_instance(spec: InstanceSpec, all_alpha: Optional[bool] = None) -> Dict[str, Any]:
    """One batch entry; failures are recorded, not raised."""
    entry: Dict[str, Any] = {'q': spec.q, 'n': spec.n}
    try:
        spec.check()
        entry['report'] = cmd_report(spec, all_alpha).to_json()
        entry['status'] = 'ok'
        entry['exit_code'] = EXIT_OK
    except (TatraException, OSError) as e:
        entry['exit_code'] = _exit_code_of(e)
        entry['status'] = {EXIT_VERIFICATION_FAILED: 'verification_failed', EXIT_BAD_PARAMETERS: 'bad_parameters',
                           EXIT_IO: 'io_error'}[entry['exit_code']]
        entry['error'] = str(e)
        if isinstance(e, VerificationError):
            entry['witness'] = e.witness
        log.warning(f"event=[instance_failed] instance=[{spec}] status=[{entry['status']}] error=[{e}]")
    return entry


def _init_worker(config_snapshot):
    set_module_attributes(cfg, config_snapshot)
    tatra_log.init_by_config()


def cmd_batch(specs: Sequence[InstanceSpec], all_alpha: Optional[bool] = None, jobs: int = 1) -> List[Dict[str, Any]]:
    """Reports in input order; with jobs > 1 the instances run in a process pool."""
    if jobs <= 1 or len(specs) <= 1:
        return [run_instance(spec, all_alpha) for spec in specs]

    snapshot = get_module_attributes(cfg)
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(snapshot,)) as executor:
        return list(executor.map(run_instance, specs, repeat(all_alpha)))


def _instance_args(parser):
    parser.add_argument('q', type=int, help='field order, a prime power')
    parser.add_argument('n', type=int, help='index of K in F*, a divisor of q-1 with q(q-1)/n even')


def _format_arg(parser, default='json'):
    parser.add_argument('--format', choices=('json', 'text'), default=default, help=f'output format (default: {default})')


def _all_alpha_arg(parser):
    parser.add_argument('--all-alpha', action='store_true', default=None,
                        help='check every base point (default: all points up to degree all_alpha_max_degree,'
                             ' an evenly spaced sample of alpha_sample_size points above)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='tatra', description='Tatra association schemes X(q,n): construction,'
                                                               ' structure verification and separability bounds')
    parser.add_argument('--version', action='version', version=f'%(prog)s {tarotools.tatra.__version__}')
    config_group = parser.add_mutually_exclusive_group()
    config_group.add_argument('-C', '--config', type=str, help='configuration file (default: tatra.toml in the'
                                                               ' config search path, built-in defaults if none)')
    config_group.add_argument('--min-config', action='store_true', help='ignore config files, use minimal config')
    parser.add_argument('--set', type=str, action='append', default=[], metavar='KEY=VALUE',
                        help='override a configuration value, e.g. --set alpha_sample_size=8 (repeatable)')
    parser.add_argument('--log-level', type=str.lower, choices=util.LOG_LEVELS, help='enable logging to console')
    parser.add_argument('--max-degree', type=int, help=f'largest accepted degree n(q+1) (default: {cfg.DEF_MAX_DEGREE})')

    verbs = parser.add_subparsers(dest='verb', required=True)

    build = verbs.add_parser('build', help='write the color matrix and the label map')
    _instance_args(build)
    build.add_argument('-o', '--out', type=str, default='.', help='output directory (default: current directory)')

    verify = verbs.add_parser('verify', help='verify relations, intersection numbers, schurity and groups')
    _instance_args(verify)
    _format_arg(verify)

    tensor = verbs.add_parser('tensor', help='intersection numbers as JSON')
    _instance_args(tensor)
    tensor.add_argument('-o', '--out', type=str, help='output file (default: standard output)')

    groups = verbs.add_parser('groups', help='automorphism and isomorphism groups, algebraic automorphisms')
    _instance_args(groups)

    report = verbs.add_parser('report', help='separability bounds')
    _instance_args(report)
    _all_alpha_arg(report)
    _format_arg(report)

    batch = verbs.add_parser('batch', help='separability reports for a file of `q n` lines')
    batch.add_argument('file', type=str, help="instance file, one `q n` pair per line, '#' comments")
    batch.add_argument('-j', '--jobs', type=int, default=1, help='parallel worker processes (default: 1)')
    _all_alpha_arg(batch)
    _format_arg(batch)

    return parser


def init_config(args):
    if args.min_config:
        cfg.set_minimal_config()
    else:
        try:
            cfg.load_from_file(args.config)
        except ConfigFileNotFoundError:
            if args.config:
                raise
            log.debug("event=[config_not_found] using=[defaults]")

    if args.set:
        cfg.set_variables(**util.split_params(args.set))
    if args.max_degree is not None:
        cfg.set_variables(max_degree=args.max_degree)
    if args.log_level:
        cfg.set_variables(log_mode=LogMode.ENABLED, log_stdout_level=args.log_level)

    tatra_log.init_by_config()


def _print_json(payload):
    print(util.dumps_json(payload))


def dispatch(args) -> int:
    verb = args.verb
    if verb == 'batch':
        with open(util.expand_user(args.file), 'r', encoding='utf-8') as file:
            specs = parse_batch(file.read())
        entries = cmd_batch(specs, args.all_alpha, args.jobs)
        if args.format == 'json':
            _print_json(entries)
        else:
            for entry in entries:
                print(f"X({entry['q']},{entry['n']}): {entry['status']}"
                      + (f" s in [{entry['report']['s_lower_bound']}, {entry['report']['s_upper_bound'] or '?'}]"
                         if entry['status'] == 'ok' else f" ({entry['error']})"))
        return max((entry['exit_code'] for entry in entries), default=EXIT_OK)

    spec = InstanceSpec(args.q, args.n).check()
    if verb == 'build':
        for path in cmd_build(spec, args.out):
            print(path)
    elif verb == 'verify':
        report = cmd_verify(spec)
        if args.format == 'json':
            _print_json(report)
        else:
            print(f"{spec}: degree {report['degree']}, rank {report['rank']}, all checks passed")
            for check in report['checks']:
                print(f"  {check}: ok")
    elif verb == 'tensor':
        payload = cmd_tensor(spec)
        if args.out:
            print(util.write_json_file(args.out, payload))
        else:
            _print_json(payload)
    elif verb == 'groups':
        _print_json(cmd_groups(spec))
    elif verb == 'report':
        report = cmd_report(spec, args.all_alpha)
        if args.format == 'json':
            _print_json(report.to_json())
        else:
            print(report.summary())
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        init_config(args)
    except ConfigFileNotFoundError as e:
        print(f"tatra: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as e:
        print(f"tatra: invalid configuration: {e}", file=sys.stderr)
        return EXIT_BAD_PARAMETERS

    try:
        return dispatch(args)
    except (TatraException, OSError) as e:
        code = _exit_code_of(e)
        print(f"tatra: {e}", file=sys.stderr)
        if isinstance(e, VerificationError) and e.witness:
            print(util.dumps_json({'check': e.check, 'witness': e.witness}), file=sys.stderr)
        return code


def main_cli():
    sys.exit(main())
