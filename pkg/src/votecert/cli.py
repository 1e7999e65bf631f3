"""Command-line front end: generate rules, check axioms, verify
strategy-proofness, and run the polytope sweeps, all as JSON reports.

Exit codes: 0 success, 1 theorem-check FAIL, 2 input validation error,
3 resource cap exceeded.  Rationals are serialized as "p/q" strings in
lowest terms together with a display-only decimal approximation.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import time
from fractions import Fraction

import click

from . import __version__
from .axioms import (
    AXIOM_NAMES,
    AxiomReport,
    distance_to_random_dictatorship,
    run_axiom,
)
from .beliefs import SPConfig, SPVerdict, check_classic_sp, check_weak_sp
from .errors import CapExceededError, DomainError, ValidationError
from .polytope import max_distance, normalize_parts, traced_constant, verify_theorem
from .prefs import anon_expand, enumerate_orderings, format_ordering
from .rules import (
    RuleTable,
    load_rule,
    perturb,
    plurality_uniform_tiebreak,
    random_dictatorship,
    rule_to_json_obj,
    save_rule,
    uniform_rule,
)

EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_CAP = 3

GEN_KINDS = ("random-dictatorship", "uniform", "plurality-tiebreak", "perturbed")


def _rational(q: Fraction) -> dict:
    return {"frac": str(q), "approx": float(q)}


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{text!r} is not a rational number like 1/10")


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_report(out: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    tmp = f"{out}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, out)


def _run_report(results: dict, seed: int | None, inputs: dict[str, str], started: float) -> dict:
    return {
        "tool": f"votecert {__version__}",
        "command": sys.argv[1:],
        "seed": seed,
        "inputs": inputs,
        "results": results,
        "wall_clock_s": round(time.monotonic() - started, 6),
    }


def _witness_json(witness: dict | None, rule: RuleTable) -> dict | None:
    if witness is None:
        return None
    orderings = enumerate_orderings(rule.m)
    out = {}
    for name, value in witness.items():
        if name in ("profile", "profile_2", "swapped_profile"):
            out[name] = [format_ordering(o, rule.names) for o in anon_expand(value, rule.m)]
        elif name in ("others", "others_2"):
            out[name] = [format_ordering(orderings[r], rule.names) for r in value]
        elif name in ("acting_rank",):
            out["acting"] = format_ordering(orderings[value], rule.names)
        elif name in ("x", "y", "z", "dominator", "dominated"):
            out[name] = rule.names[value]
        else:
            out[name] = value
    return out


def _report_json(report: AxiomReport, rule: RuleTable) -> dict:
    return {"eps": _rational(report.eps), "witness": _witness_json(report.witness, rule)}


def _verdict_json(verdict: SPVerdict, rule: RuleTable) -> dict:
    out = {
        "status": verdict.status,
        "polya_degree": verdict.polya_degree,
        "max_degree_tried": verdict.max_degree_tried,
        "instances_total": verdict.instances_total,
        "note": "point-mass beliefs are scanned; restricting to full-support "
        "beliefs keeps every certified verdict certified",
    }
    if verdict.instances_unknown:
        out["instances_unknown"] = [
            {
                "truthful": format_ordering(i.truthful, rule.names),
                "misreport": format_ordering(i.misreport, rule.names),
                "k": i.k,
            }
            for i in verdict.instances_unknown
        ]
    w = verdict.witness
    if w is not None:
        orderings = enumerate_orderings(rule.m)
        entry = {
            "truthful": format_ordering(w.instance.truthful, rule.names),
            "misreport": format_ordering(w.instance.misreport, rule.names),
            "k": w.instance.k,
            "utility": [str(q) for q in w.utility],
            "rho": str(w.rho),
            "gain": _rational(w.gain),
        }
        if w.belief is not None:
            entry["stage"] = w.stage
            entry["belief"] = {
                format_ordering(orderings[r], rule.names): str(q)
                for r, q in enumerate(w.belief)
                if q
            }
        if w.others is not None:
            entry["others"] = [format_ordering(orderings[r], rule.names) for r in w.others]
        out["witness"] = entry
    return out


def _handle_errors(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CapExceededError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CAP)
        except (DomainError, ValidationError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="votecert")
def main():
    """Exact checkers for anonymous randomized voting rules."""


@main.command()
@click.argument("kind", type=click.Choice(GEN_KINDS))
@click.argument("m", type=int)
@click.argument("n", type=int)
@click.option("--delta", default="0", help="Perturbation size (rational, perturbed only).")
@click.option("--seed", default=0, show_default=True, help="Noise seed (perturbed only).")
@click.option("--out", required=True, type=click.Path(), help="Rule file to write.")
@_handle_errors
def gen(kind, m, n, delta, seed, out):
    """Write a built-in rule table as a JSON rule file."""
    if kind == "random-dictatorship":
        rule = random_dictatorship(m, n)
    elif kind == "uniform":
        rule = uniform_rule(m, n)
    elif kind == "plurality-tiebreak":
        rule = plurality_uniform_tiebreak(m, n)
    else:
        rule = perturb(random_dictatorship(m, n), _fraction_arg(delta), seed)
    save_rule(rule, out)
    click.echo(f"wrote {kind} rule for m={m}, n={n} with {len(rule.table)} profiles to {out}")


@main.command()
@click.option("--rule", "rule_path", required=True, type=click.Path(exists=True))
@click.option("--axiom", default="all", show_default=True,
              help=f"One of {', '.join(AXIOM_NAMES)}, distance, or all.")
@click.option("--out", default=None, type=click.Path())
@_handle_errors
def check(rule_path, axiom, out):
    """Report minimal-eps values (and witnesses) for the chosen axioms."""
    started = time.monotonic()
    rule = load_rule(rule_path)
    names = list(AXIOM_NAMES) + ["distance"] if axiom == "all" else [axiom]
    results = {}
    for name in names:
        if name == "distance":
            rep = distance_to_random_dictatorship(rule)
            results["distance"] = {
                "closeness": _report_json(rep.closeness, rule),
                "table-vs-canonical": _report_json(rep.table_vs_canonical, rule),
                "canonical-vs-linear": _report_json(rep.canonical_vs_linear, rule),
            }
        else:
            results[name] = _report_json(run_axiom(rule, name), rule)
    _write_report(out, _run_report(results, None, {rule_path: _digest(rule_path)}, started))


@main.command("sp-check")
@click.option("--rule", "rule_path", required=True, type=click.Path(exists=True))
@click.option("--classic", is_flag=True, help="Check classic strategy-proofness instead.")
@click.option("--polya-max", default=6, show_default=True)
@click.option("--trials", default=10_000, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", default=None, type=click.Path())
@_handle_errors
def sp_check(rule_path, classic, polya_max, trials, seed, out):
    """Decide strategy-proofness (classic, or w.r.t. all i.i.d. beliefs)."""
    started = time.monotonic()
    rule = load_rule(rule_path)
    if classic:
        verdict = check_classic_sp(rule)
    else:
        verdict = check_weak_sp(rule, SPConfig(polya_max=polya_max, trials=trials, seed=seed))
    results = {"mode": "classic" if classic else "iid-beliefs", "verdict": _verdict_json(verdict, rule)}
    _write_report(out, _run_report(results, seed, {rule_path: _digest(rule_path)}, started))


@main.command("lp-max")
@click.option("--m", required=True, type=int)
@click.option("--n", required=True, type=int)
@click.option("--eps", required=True)
@click.option("--parts", default="responsive,isolated,unanimity", show_default=True)
@click.option("--out", default=None, type=click.Path())
@_handle_errors
def lp_max(m, n, eps, parts, out):
    """Maximize the distance to random dictatorship over the constraint polytope."""
    started = time.monotonic()
    eps = _fraction_arg(eps)
    part_set = normalize_parts(p.strip() for p in parts.split(","))
    result = max_distance(m, n, eps, part_set)
    constant = traced_constant(m) if m >= 3 else None
    names = result.witness.names
    results = {
        "m": m,
        "n": n,
        "eps": _rational(eps),
        "parts": sorted(part_set),
        "d_star": _rational(result.d_star),
        "free_dim": result.free_dim,
        "n_solves": result.n_solves,
        "witness_rule": rule_to_json_obj(result.witness),
        "witness_profile": [
            format_ordering(o, names) for o in anon_expand(result.witness_profile, m)
        ],
        "witness_candidate": names[result.witness_candidate],
        "witness_sign": result.witness_sign,
        "per_objective": [
            {
                "profile": [format_ordering(o, names) for o in anon_expand(o_v.profile, m)],
                "candidate": names[o_v.candidate],
                "sign": o_v.sign,
                "value": _rational(o_v.value),
            }
            for o_v in result.per_objective
        ],
    }
    if constant is not None:
        results["constant"] = _rational(constant.value)
        results["constant_links"] = list(constant.links)
    _write_report(out, _run_report(results, None, {}, started))


@main.command("verify-theorem")
@click.argument("m", type=int)
@click.argument("n", type=int)
@click.argument("eps")
@click.option("--out", default=None, type=click.Path())
@_handle_errors
def verify_theorem_cmd(m, n, eps, out):
    """PASS iff the polytope's worst-case distance is at most C(m)*eps."""
    started = time.monotonic()
    eps = _fraction_arg(eps)
    outcome = verify_theorem(m, n, eps)
    results = {"status": outcome["status"], "m": m, "n": n, "eps": _rational(eps)}
    if outcome["status"] == "SKIPPED":
        results["reason"] = outcome["reason"]
    else:
        results["d_star"] = _rational(outcome["d_star"])
        results["constant"] = _rational(outcome["constant"])
        results["bound"] = _rational(outcome["bound"])
        results["links"] = list(outcome["links"])
    _write_report(out, _run_report(results, None, {}, started))
    click.echo(f"verify-theorem m={m} n={n} eps={eps}: {outcome['status']}")
    if outcome["status"] == "FAIL":
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":
    main()
