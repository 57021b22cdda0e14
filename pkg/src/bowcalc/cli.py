"""Command-line front end.

Exit codes: 0 all checks passed, 2 a certification failed, 3 malformed
input.  BOWCALC_PRECISION=extended switches the numeric evaluator to
mpmath-backed extended precision.
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction

import click

from . import verify as verify_mod
from .bowcore import (BraneDiagram, InputError, crossings,
                      enumerate_fixed_points, mirror, parse_brane_diagram)
from .expr import HBAR, a_var, evaluate, evaluate_h, random_point
from .shuffle import wheel_check
from .stab import (PoleError, RestrictionError, SlopeConfig, euler_class_at,
                   restrict_class, w_function, wtilde)


class CertificationFailure(Exception):
    """A verification ran to completion but did not certify (exit code 2)."""


def _diagram(text):
    return parse_brane_diagram(text)


def _chamber(s, n):
    if not s:
        return tuple(range(1, n + 1))
    try:
        sigma = tuple(int(x) for x in s.split(','))
    except ValueError:
        raise InputError('bad chamber %r' % s)
    if sorted(sigma) != list(range(1, n + 1)):
        raise InputError('chamber must be a permutation of 1..%d' % n)
    return sigma


def _slopes(s, m):
    if not s:
        return SlopeConfig.default(m)
    try:
        vals = [Fraction(x) for x in s.split(',')]
    except (ValueError, ZeroDivisionError):
        raise InputError('bad slopes %r' % s)
    if len(vals) != m - 1:
        raise InputError('need %d slopes for %d NS5 branes' % (m - 1, m))
    return SlopeConfig(vals)


def _q_values(s):
    out = []
    for part in s.split(','):
        try:
            out.append(complex(part.strip().replace('i', 'j')))
        except ValueError:
            raise InputError('bad q value %r' % part)
    if any(abs(q) >= 1 for q in out):
        raise InputError('|q| must be < 1')
    return out


def _emit(payload, fmt, out):
    if fmt == 'json':
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    else:
        text = payload if isinstance(payload, str) else _render_text(payload)
    if out:
        with open(out, 'w') as fh:
            fh.write(text + '\n')
    else:
        click.echo(text)


def _render_text(payload, indent=0):
    pad = '  ' * indent
    if isinstance(payload, dict):
        lines = []
        for k, v in payload.items():
            if isinstance(v, (dict, list)) and v:
                lines.append('%s%s:' % (pad, k))
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append('%s%s: %s' % (pad, k, v))
        return '\n'.join(lines)
    if isinstance(payload, list):
        return '\n'.join(_render_text(v, indent) if isinstance(v, (dict, list))
                         else '%s- %s' % (pad, v) for v in payload)
    return '%s%s' % (pad, payload)


flavor_opt = click.option('--flavor', type=click.Choice(['H', 'K', 'E']),
                          default='E', show_default=True)
chamber_opt = click.option('--chamber', default='',
                           help='permutation, e.g. "2,1,3" (default id)')
slopes_opt = click.option('--slopes', default='',
                          help='comma list of rationals, e.g. "431/997,112/997"')
points_opt = click.option('--points', default=5, show_default=True)
tol_opt = click.option('--tol', default=1e-8, show_default=True)
seed_opt = click.option('--seed', default=0, show_default=True)
fmt_opt = click.option('--format', 'fmt',
                       type=click.Choice(['json', 'text', 'latex']),
                       default='text', show_default=True)
out_opt = click.option('--out', default='', help='write output to a file')
q_opt = click.option('--q', 'qs', default='0.05,0.1+0.1i,0.3',
                     show_default=True, help='comma list of nomes')


@click.group()
def cli():
    """Stable envelopes on type-A bow varieties: computation, restriction,
    axiom verification, and mirror-symmetry identity certification."""


@cli.command('parse')
@click.argument('diagram')
@fmt_opt
@out_opt
def cmd_parse(diagram, fmt, out):
    """Parse a brane diagram and print its normalized data."""
    d = _diagram(diagram)
    _emit({'text': d.text(), 'r': list(d.r), 'c': list(d.c),
           'm': d.m, 'n': d.n, 'dims': list(d.dims)}, fmt, out)


@cli.command('fixed-points')
@click.argument('diagram')
@fmt_opt
@out_opt
def cmd_fixed_points(diagram, fmt, out):
    """List the torus fixed points (binary contingency tables)."""
    d = _diagram(diagram)
    fps = enumerate_fixed_points(d, None)
    if not fps:
        raise InputError('empty fixed point set: no 01-matrix has margins '
                         'r=%s, c=%s' % (list(d.r), list(d.c)))
    md = mirror(fps[0]).diagram
    mids = {f.matrix: f.fid for f in enumerate_fixed_points(md, None)}
    rows = []
    for f in fps:
        rows.append({'id': f.fid,
                     'matrix': [''.join(str(x) for x in row)
                                for row in f.matrix],
                     'ties': f.ties,
                     'crossings': crossings(f),
                     'mirror_id': mids[mirror(f).matrix]})
    _emit({'r': list(d.r), 'c': list(d.c), 'count': len(fps),
           'fixed_points': rows}, fmt, out)


@cli.command('stab')
@click.argument('diagram')
@click.argument('fid', type=int)
@flavor_opt
@chamber_opt
@slopes_opt
@click.option('--restrict-at', 'rid', type=int, default=0,
              help='also restrict at this fixed point id')
@points_opt
@q_opt
@tol_opt
@seed_opt
@fmt_opt
@out_opt
def cmd_stab(diagram, fid, flavor, chamber, slopes, rid, points, qs, tol,
             seed, fmt, out):
    """Compute the W function of a fixed point."""
    d = _diagram(diagram)
    fps = enumerate_fixed_points(d, None)
    if not 1 <= fid <= len(fps):
        raise InputError('fixed point id out of range 1..%d' % len(fps))
    sigma = _chamber(chamber, d.n)
    sl = _slopes(slopes, d.m) if flavor == 'K' else None
    w = w_function(fps[fid - 1], sigma, flavor, sl)
    payload = w.to_json() if fmt == 'json' else repr(w.cls)
    if rid:
        if not 1 <= rid <= len(fps):
            raise InputError('restriction id out of range 1..%d' % len(fps))
        values = _restriction_values(w, fps[rid - 1], flavor, points,
                                     _q_values(qs), seed, d)
        if fmt == 'json':
            payload['restriction_at'] = rid
            payload['restriction_values'] = [str(v) for v in values]
        else:
            payload += '\nrestriction at %d: %s' % (
                rid, ', '.join(str(v) for v in values))
    _emit(payload, fmt, out)


def _restriction_values(w, g, flavor, points, q_values, seed, d):
    restr = restrict_class(w, g)
    rng = random.Random(seed)
    if flavor == 'H':
        out = []
        for _ in range(max(points, 1)):
            vals = {a_var(j + 1): Fraction(rng.randrange(10 ** 4, 10 ** 6),
                                           997) for j in range(d.n)}
            vals[HBAR] = Fraction(rng.randrange(10 ** 4, 10 ** 6), 991)
            out.append(restr.eval_exact(vals))
        return out
    out = []
    for _ in range(max(points, 1)):
        q = q_values[0] if flavor == 'E' else None
        m_z = d.m if flavor == 'E' else 0
        out.append(verify_mod._with_resample(
            rng, d.n, m_z, q, lambda pt: restr.eval(pt, rng)))
    return out


@cli.command('restrict')
@click.argument('diagram')
@click.argument('fid', type=int)
@click.argument('gid', type=int)
@flavor_opt
@chamber_opt
@slopes_opt
@points_opt
@q_opt
@seed_opt
@fmt_opt
@out_opt
def cmd_restrict(diagram, fid, gid, flavor, chamber, slopes, points, qs,
                 seed, fmt, out):
    """Restrict W(f) at a fixed point g and print the values."""
    d = _diagram(diagram)
    fps = enumerate_fixed_points(d, None)
    if not (1 <= fid <= len(fps) and 1 <= gid <= len(fps)):
        raise InputError('fixed point id out of range 1..%d' % len(fps))
    sigma = _chamber(chamber, d.n)
    sl = _slopes(slopes, d.m) if flavor == 'K' else None
    w = w_function(fps[fid - 1], sigma, flavor, sl)
    values = _restriction_values(w, fps[gid - 1], flavor, points,
                                 _q_values(qs), seed, d)
    _emit({'f': fid, 'g': gid, 'flavor': flavor,
           'values': [str(v) for v in values]}, fmt, out)


@cli.command('verify-axioms')
@click.argument('diagram')
@flavor_opt
@chamber_opt
@slopes_opt
@points_opt
@tol_opt
@seed_opt
@fmt_opt
@out_opt
def cmd_verify_axioms(diagram, flavor, chamber, slopes, points, tol, seed,
                      fmt, out):
    """Run the diagonal / triangularity axiom suite."""
    d = _diagram(diagram)
    sigma = _chamber(chamber, d.n)
    sl = _slopes(slopes, d.m) if flavor == 'K' else None
    rep = verify_mod.check_axioms(d, None, sigma=sigma, flavor=flavor,
                                  points=points, tol=tol, seed=seed,
                                  slopes=sl)
    _emit(rep, fmt, out)
    if not rep['passed']:
        raise CertificationFailure('axiom suite failed')


@cli.command('mirror-identity')
@click.argument('diagram')
@click.argument('fid', type=int)
@click.argument('gid', type=int)
@click.option('--points', default=20, show_default=True)
@q_opt
@tol_opt
@seed_opt
@fmt_opt
@out_opt
def cmd_mirror_identity(diagram, fid, gid, points, qs, tol, seed, fmt, out):
    """Generate and certify the theta identity for a pair (f, g)."""
    d = _diagram(diagram)
    fps = enumerate_fixed_points(d, None)
    if not (1 <= fid <= len(fps) and 1 <= gid <= len(fps)):
        raise InputError('fixed point id out of range 1..%d' % len(fps))
    rec = verify_mod.mirror_identity(d, None, fid, gid, points=points,
                                     q_list=_q_values(qs), tol=tol,
                                     seed=seed)
    if fmt == 'latex':
        _emit(rec.to_latex(), fmt, out)
    elif fmt == 'json':
        _emit(rec.to_json(), fmt, out)
    else:
        _emit('%r\nresidual: %g\n%s' % (
            rec, rec.certification['max_residual'], rec.to_latex()),
            fmt, out)


@cli.command('limits')
@click.argument('diagram')
@chamber_opt
@slopes_opt
@click.option('--q', 'qs', default='1e-2,1e-3,1e-4,1e-8,1e-12,1e-16',
              show_default=True)
@click.option('--points', default=2, show_default=True)
@click.option('--tol', default=1e-6, show_default=True)
@seed_opt
@click.option('--direction', type=click.Choice(['up', 'down']),
              default='up', show_default=True)
@fmt_opt
@out_opt
def cmd_limits(diagram, chamber, slopes, qs, points, tol, seed, direction,
               fmt, out):
    """E->K pinned-q convergence and K->H leading-degree checks."""
    d = _diagram(diagram)
    sigma = _chamber(chamber, d.n)
    sl = _slopes(slopes, d.m)
    q_list = [q.real for q in _q_values(qs)]
    rep = verify_mod.limit_suite(d, None, sigma=sigma, slopes=sl,
                                 q_list=q_list, points=points, tol=tol,
                                 seed=seed, direction=direction)
    _emit(rep, fmt, out)
    if not rep['passed']:
        raise CertificationFailure('limit suite failed')


@cli.command('wheel-check')
@click.argument('diagram')
@click.argument('fid', type=int)
@flavor_opt
@chamber_opt
@slopes_opt
@click.option('--points', default=4, show_default=True,
              help='random samples per substitution pattern')
@click.option('--q', 'qs', default='0.17', show_default=True)
@click.option('--tol', default=1e-9, show_default=True)
@seed_opt
@fmt_opt
@out_opt
def cmd_wheel_check(diagram, fid, flavor, chamber, slopes, points, qs, tol,
                    seed, fmt, out):
    """Check the wheel conditions on the Wtilde of a fixed point."""
    d = _diagram(diagram)
    fps = enumerate_fixed_points(d, None)
    if not 1 <= fid <= len(fps):
        raise InputError('fixed point id out of range 1..%d' % len(fps))
    sigma = _chamber(chamber, d.n)
    sl = _slopes(slopes, d.m) if flavor == 'K' else None
    wt = wtilde(fps[fid - 1], sigma, flavor, sl)
    rep = wheel_check(wt, trials=points, q=_q_values(qs)[0], tol=tol,
                      seed=seed)
    _emit(rep, fmt, out)
    if not rep['passed']:
        raise CertificationFailure('wheel conditions failed')


@cli.command('sweep')
@click.argument('max_m', type=int)
@click.argument('max_n', type=int)
@click.argument('max_boxes', type=int)
@click.option('--points', default=3, show_default=True)
@click.option('--q', 'qs', default='0.1', show_default=True)
@click.option('--tol', default=1e-7, show_default=True)
@seed_opt
@fmt_opt
@out_opt
def cmd_sweep(max_m, max_n, max_boxes, points, qs, tol, seed, fmt, out):
    """Tabulate (term count, theta factors per term) of the certified
    irreducible identities over all small varieties within the bounds."""
    rep = verify_mod.sweep(max_m, max_n, max_boxes, points=points,
                           q_list=_q_values(qs), tol=tol, seed=seed)
    if fmt == 'json':
        rep = dict(rep)
        rep['table'] = [{'terms': t, 'factors': f, 'count': c}
                        for (t, f), c in sorted(rep['table'].items())]
        _emit(rep, fmt, out)
    else:
        lines = ['terms  factors  count']
        for (t, f), cnt in sorted(rep['table'].items()):
            lines.append('%5d  %7d  %5d' % (t, f, cnt))
        _emit('\n'.join(lines), fmt, out)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except InputError as exc:
        click.echo('input error: %s' % exc, err=True)
        return 3
    except (click.UsageError, click.BadParameter) as exc:
        click.echo('usage error: %s' % exc.format_message(), err=True)
        return 3
    except click.exceptions.Abort:
        return 3
    except CertificationFailure as exc:
        click.echo('FAILED: %s' % exc, err=True)
        return 2
    except (PoleError, RestrictionError) as exc:
        click.echo('FAILED: %s' % exc, err=True)
        return 2
    return 0


if __name__ == '__main__':
    sys.exit(main())
