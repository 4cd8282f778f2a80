"""Command line interface.

Exit codes: 0 the property holds, 1 it is violated (a witness is
printed), 2 the result is inconclusive (state cap hit, or a bounded
oracle search that found nothing), 3 bad input.
"""
from __future__ import annotations

import pathlib
import sys

import click

from . import logic
from .engine import check_flow_ctlstar, check_ltl
from .frontend import (ASSUMPTION_KINDS, TEMPLATE_ARITY, LayoutError,
                       assumption_template, building_to_pnwt, parse_layout,
                       property_template)
from .kripke import dump_kripke
from .nets import (CapExceeded, LassoFiringSequence, NetError, dump_net,
                   parse_net, validate_safe)
from .oracle import OracleUnsupported, oracle_check

EXIT_HOLDS = 0
EXIT_VIOLATED = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _load_net(path: str):
    try:
        net = parse_net(pathlib.Path(path).read_text(),
                        name=pathlib.Path(path).stem)
    except (OSError, NetError) as exc:
        raise InputError(str(exc))
    report = validate_safe(net)
    if report.status == "violation":
        raise InputError(
            "net is not 1-safe: firing %s at {%s} double-marks a place"
            % (report.transition, ", ".join(sorted(report.marking))))
    if report.status == "cap_exceeded":
        click.echo("warning: safety check hit its exploration cap", err=True)
    return net


def _load_formula(text: str | None, path: str | None):
    if (text is None) == (path is None):
        raise InputError("give exactly one of --formula / --formula-file")
    if path is not None:
        try:
            text = pathlib.Path(path).read_text()
        except OSError as exc:
            raise InputError(str(exc))
    try:
        return logic.parse_formula(text)
    except logic.FormulaError as exc:
        raise InputError(str(exc))


def _print_witness(witness: LassoFiringSequence) -> None:
    click.echo("witness stem: %s" % (" ".join(witness.stem) or "(empty)"))
    if witness.stopped:
        click.echo("witness loop: (stopped)")
    else:
        click.echo("witness loop: %s" % " ".join(witness.loop))


def _write(directory: str, filename: str, content: str) -> None:
    d = pathlib.Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / filename).write_text(content)
    click.echo("wrote %s" % (d / filename))


@click.group()
def cli() -> None:
    """Model checker for safe Petri nets with transits."""


@cli.command(name="check")
@click.option("--net", "net_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--formula", "formula_text", default=None,
              help="Specification text (LTL run parts, A-quantified flows).")
@click.option("--formula-file", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dump-kripke", "kripke_dir", default=None,
              type=click.Path(file_okay=False),
              help="Write each flow subformula's chain Kripke structure here.")
@click.option("--dump-nba", "nba_dir", default=None,
              type=click.Path(file_okay=False),
              help="Write each flow subformula's Büchi automaton here.")
@click.option("--dump-mcnet", "mcnet_dir", default=None,
              type=click.Path(file_okay=False),
              help="Write the composed net with inhibitor arcs here.")
@click.option("--dump-ltl", "ltl_dir", default=None,
              type=click.Path(file_okay=False),
              help="Write the rewritten LTL formula here.")
@click.option("--oracle-bound", default=None, type=int,
              help="Cross-check the verdict against the bounded oracle.")
@click.option("--state-cap", default=None, type=int,
              help="Abort with an inconclusive verdict beyond this many "
                   "product states.")
@click.option("--workers", default=1, type=int,
              help="Worker threads for the oracle cross-check.")
def check_cmd(net_path, formula_text, formula_file, kripke_dir, nba_dir,
              mcnet_dir, ltl_dir, oracle_bound, state_cap, workers):
    """Model-check a net against a specification."""
    net = _load_net(net_path)
    psi = _load_formula(formula_text, formula_file)
    has_flows = bool(logic.collect_flow_subformulas(psi))

    if has_flows:
        verdict = check_flow_ctlstar(net, psi, state_cap=state_cap)
    else:
        try:
            verdict = check_ltl(net, psi, cap=state_cap)
        except CapExceeded as exc:
            click.echo("verdict: inconclusive (%s)" % exc)
            sys.exit(EXIT_INCONCLUSIVE)

    arts = verdict.artifacts
    if kripke_dir is not None:
        for i, k in enumerate(arts.get("kripkes", ()), start=1):
            _write(kripke_dir, "kripke_%d.txt" % i, dump_kripke(k))
    if nba_dir is not None:
        for i, nba in enumerate(arts.get("nbas", ()), start=1):
            _write(nba_dir, "nba_%d.txt" % i, nba.dump())
    if mcnet_dir is not None and "composed" in arts:
        _write(mcnet_dir, "mcnet.txt", dump_net(arts["composed"]))
    if ltl_dir is not None:
        phi = arts.get("ltl", psi)
        _write(ltl_dir, "ltl.txt",
               "format-version 1\n%s\n" % logic.to_text(phi))

    click.echo("verdict: %s" % verdict.status
               + (" (%s)" % verdict.reason if verdict.reason else ""))
    if verdict.witness is not None:
        _print_witness(verdict.witness)

    if oracle_bound is not None:
        try:
            result = oracle_check(net, psi, oracle_bound, workers=workers)
        except OracleUnsupported as exc:
            click.echo("oracle: skipped (%s)" % exc)
            result = None
        if result is not None:
            click.echo("oracle: %s (%d lassos)"
                       % (result.status, result.lassos_checked))
            if verdict.status == "holds" and result.status == "violated":
                click.echo("DISAGREEMENT: engine holds, oracle found:")
                _print_witness(result.witness)
                sys.exit(EXIT_INCONCLUSIVE)

    if verdict.status == "inconclusive":
        sys.exit(EXIT_INCONCLUSIVE)
    sys.exit(EXIT_VIOLATED if verdict.status == "violated" else EXIT_HOLDS)


@cli.command()
@click.option("--layout", "layout_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path())
def encode(layout_path, out_path):
    """Encode a building layout as a Petri net with transits."""
    try:
        layout = parse_layout(pathlib.Path(layout_path).read_text(),
                              name=pathlib.Path(layout_path).stem)
        net = building_to_pnwt(layout)
    except (OSError, LayoutError, NetError) as exc:
        raise InputError(str(exc))
    report = validate_safe(net)
    if report.status == "violation":
        raise InputError("encoded net failed the safety audit")
    pathlib.Path(out_path).write_text(dump_net(net))
    click.echo("wrote %s (%d places, %d transitions)"
               % (out_path, len(net.places), len(net.transitions)))


@cli.command()
@click.option("--name", required=True,
              help="One of: %s; or an assumption: %s."
                   % (", ".join(sorted(TEMPLATE_ARITY)),
                      ", ".join(ASSUMPTION_KINDS)))
@click.option("--args", "arguments", multiple=True,
              help="Template arguments (atoms or formula fragments).")
@click.option("--net", "net_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Net file (required for assumption templates).")
def template(name, arguments, net_path):
    """Print a stock property or assumption formula."""
    try:
        if name in TEMPLATE_ARITY:
            formula = property_template(name, list(arguments))
        elif name in ASSUMPTION_KINDS:
            if net_path is None:
                raise InputError("assumption %r needs --net" % name)
            net = _load_net(net_path)
            transition = arguments[0] if arguments else None
            formula = assumption_template(name, net, transition)
        else:
            raise InputError("unknown template %r" % name)
    except logic.FormulaError as exc:
        raise InputError(str(exc))
    click.echo(logic.to_text(formula))


@cli.command()
@click.option("--net", "net_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--formula", "formula_text", default=None)
@click.option("--formula-file", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--bound", required=True, type=int)
@click.option("--workers", default=1, type=int)
def oracle(net_path, formula_text, formula_file, bound, workers):
    """Bounded brute-force search for a violating lasso.

    Finding no violation is inconclusive (exit 2), not a proof.
    """
    net = _load_net(net_path)
    psi = _load_formula(formula_text, formula_file)
    try:
        result = oracle_check(net, psi, bound, workers=workers)
    except OracleUnsupported as exc:
        raise InputError(str(exc))
    if result.status == "violated":
        click.echo("verdict: violated (%d lassos searched)"
                   % result.lassos_checked)
        _print_witness(result.witness)
        sys.exit(EXIT_VIOLATED)
    click.echo("verdict: no violation up to bound %d (%d lassos searched)"
               % (bound, result.lassos_checked))
    sys.exit(EXIT_INCONCLUSIVE)


def main(argv=None):
    """Entry point mapping click usage errors to the input-error code."""
    try:
        return cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code if isinstance(exc, InputError) else EXIT_INPUT
    except click.Abort:
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
