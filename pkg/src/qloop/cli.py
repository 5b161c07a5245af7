"""Command line front end: verify | drinfeld | iso | dump.

Reports are JSON documents rendered with sorted keys, so identical
configuration and seed produce byte-identical output on the exact backend.
Wall-clock timing is opt-in (--timing) because it breaks that guarantee.
Exit codes: 0 all selected suites passed, 1 a suite failed, 2 configuration
or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .affine import EvaluationModule
from .analysis import (
    check_nilpotent_type1,
    joint_kernel,
    materialize,
    verify_relations,
)
from .config import (
    RunConfig,
    build_config,
    load_config_file,
    parse_scalar,
    parse_weight_selector,
)
from .drinfeld import drinfeld_closed, drinfeld_from_module, iso_direct, iso_explicit, iso_witness
from .errors import ConfigError, RankTooSmallError
from .scalars import make_backend
from .schnizer import SchnizerModule, vec_scale

F0_BRACKET_CONVENTION = "-(m+b)[1, n-s+1]"


def _conventions(cfg: RunConfig) -> dict:
    return {
        "f0_bracket_argument": F0_BRACKET_CONVENTION,
        "float_epsilon": "exp(2*pi*i/l)",
        "gcd_warning": cfg.gcd_warning(),
    }


def _config_echo(cfg: RunConfig) -> dict:
    echo = {
        "n": cfg.n,
        "l": cfg.l,
        "backend": cfg.backend,
        "lambda": cfg.lam if isinstance(cfg.lam, str) else list(cfg.lam),
        "sign": cfg.sign,
        "seed": cfg.seed,
        "format": cfg.format,
    }
    if cfg.backend == "float":
        echo["tolerance"] = cfg.tolerance
    return echo


def _skeleton(command: str, cfg: RunConfig) -> dict:
    return {
        "tool": {"name": "qloop", "version": __version__},
        "command": command,
        "config": _config_echo(cfg),
        "conventions": _conventions(cfg),
        "suites": [],
        "passed": True,
        "timing": None,
    }


def _suite(report: dict, name: str, cases: list) -> None:
    passed = all(c.get("passed", True) for c in cases)
    report["suites"].append({"name": name, "passed": passed, "cases": cases})
    report["passed"] = report["passed"] and passed


def _relation_case(header: dict, relation_report) -> dict:
    case = dict(header)
    case["passed"] = relation_report.passed
    case["relations_checked"] = len(relation_report.results)
    case["failures"] = [
        {"relation": r.relation, "witness": r.witness}
        for r in relation_report.failures()
    ]
    return case


def cmd_verify(cfg: RunConfig) -> dict:
    backend = make_backend(cfg.backend, cfg.l, cfg.tolerance)
    weights = parse_weight_selector(cfg.lam, cfg.n, cfg.l, cfg.seed)
    levels = cfg.levels
    report = _skeleton("verify", cfg)
    report["config"]["level"] = cfg.level
    report["config"]["a"] = cfg.a
    spectral = parse_scalar(backend, cfg.a, "a")

    if "finite" in levels:
        cases = []
        for lam in weights:
            module = SchnizerModule(backend, cfg.n, lam)
            operators = None
            if cfg.corrupt_action:
                operators = module.finite_generator_map()
                honest = operators["e1"]
                operators["e1"] = lambda v, op=honest: vec_scale(
                    backend, backend.eps, op(v)
                )
            rep = verify_relations(module, "finite", operators=operators)
            cases.append(_relation_case({"lambda": list(lam)}, rep))
        _suite(report, "finite-relations", cases)

        cases = []
        for lam in weights:
            module = SchnizerModule(backend, cfg.n, lam)
            cases.append(
                _relation_case({"lambda": list(lam)}, check_nilpotent_type1(module))
            )
        _suite(report, "nilpotency", cases)

        cases = []
        for lam in weights:
            module = SchnizerModule(backend, cfg.n, lam)
            raising = joint_kernel(module, [module.e_op(i) for i in range(1, cfg.n + 1)])
            lowering = joint_kernel(module, [module.f_op(i) for i in range(1, cfg.n + 1)])
            top = module.basis_vector(module.zero_index())
            bottom = module.basis_vector(module.lowest_weight_index())
            ok = (
                raising.dim == 1
                and lowering.dim == 1
                and raising.contains(top)
                and lowering.contains(bottom)
            )
            cases.append(
                {
                    "lambda": list(lam),
                    "raising_kernel_dim": raising.dim,
                    "lowering_kernel_dim": lowering.dim,
                    "lowest_index": list(module.lowest_weight_index()),
                    "passed": ok,
                }
            )
        _suite(report, "kernels", cases)

    if "affine" in levels:
        cases = []
        for lam in weights:
            module = SchnizerModule(backend, cfg.n, lam)
            for sign in cfg.signs:
                ev = EvaluationModule(module, spectral, sign)
                rep = verify_relations(ev, "affine")
                cases.append(
                    _relation_case(
                        {"lambda": list(lam), "sign": sign, "a": cfg.a}, rep
                    )
                )
        _suite(report, "affine-relations", cases)
    return report


def cmd_drinfeld(cfg: RunConfig) -> dict:
    backend = make_backend(cfg.backend, cfg.l, cfg.tolerance)
    weights = parse_weight_selector(cfg.lam, cfg.n, cfg.l, cfg.seed)
    report = _skeleton("drinfeld", cfg)
    report["config"]["a"] = cfg.a
    report["config"]["index"] = cfg.index
    spectral = parse_scalar(backend, cfg.a, "a")
    cases = []
    for lam in weights:
        module = SchnizerModule(backend, cfg.n, lam)
        for sign in cfg.signs:
            ev = EvaluationModule(module, spectral, sign)
            if cfg.index == "support":
                indices = [i for i in range(1, cfg.n + 1) if lam[i - 1]]
            elif cfg.index == "all":
                indices = list(range(1, cfg.n + 1))
            else:
                try:
                    indices = [int(cfg.index)]
                except ValueError:
                    raise ConfigError(f"index: expected 'support', 'all' or an integer, got {cfg.index!r}")
                if not 1 <= indices[0] <= cfg.n:
                    raise ConfigError(f"index: {indices[0]} outside 1..{cfg.n}")
            polys = []
            all_equal = True
            for i in indices:
                closed = drinfeld_closed(backend, cfg.n, lam, spectral, sign, i)
                extracted = drinfeld_from_module(ev, i)
                equal = closed.eq(extracted)
                all_equal = all_equal and equal
                polys.append(
                    {
                        "i": i,
                        "degree": closed.degree,
                        "closed": closed.serialize(),
                        "module": extracted.serialize(),
                        "equal": equal,
                    }
                )
            cases.append(
                {
                    "lambda": list(lam),
                    "sign": sign,
                    "a": cfg.a,
                    "P": polys,
                    "passed": all_equal,
                }
            )
    _suite(report, "drinfeld-extraction", cases)
    return report


def cmd_iso(cfg: RunConfig) -> dict:
    backend = make_backend(cfg.backend, cfg.l, cfg.tolerance)
    report = _skeleton("iso", cfg)
    report["config"]["a_plus"] = cfg.a_plus
    report["config"]["a_minus"] = cfg.a_minus
    report["config"]["sweep"] = bool(cfg.sweep or cfg.lam == "all")

    if cfg.sweep or cfg.lam == "all":
        weights = [w for w in parse_weight_selector("all", cfg.n, cfg.l, cfg.seed) if any(w)]
        agreement = True
        satisfying = []
        disagreements = []
        pairs = 0
        for lam in weights:
            for j in range(cfg.l):
                a_plus = backend.eps_pow(j)
                direct = iso_direct(backend, cfg.n, lam, a_plus, backend.one)
                explicit = iso_explicit(backend, cfg.n, lam, a_plus, backend.one)
                pairs += 1
                if direct.verdict != explicit.verdict:
                    agreement = False
                    disagreements.append({"lambda": list(lam), "a_plus": f"eps^{j}"})
                if direct.verdict:
                    satisfying.append(
                        {
                            "lambda": list(lam),
                            "a_plus": f"eps^{j}",
                            "a_minus": "1",
                            "support_size": sum(1 for x in lam if x),
                        }
                    )
        coincidences = [s for s in satisfying if s["support_size"] > 1]
        witness_checked = 0
        witness_agreement = True
        budget = satisfying[:5] if cfg.n > 2 else satisfying
        for s in budget:
            lam = tuple(s["lambda"])
            a_plus = backend.eps_pow(int(s["a_plus"].split("^")[1]))
            w = iso_witness(backend, cfg.n, lam, a_plus, backend.one)
            witness_checked += 1
            witness_agreement = witness_agreement and w.verdict
        cases = [
            {
                "pairs_checked": pairs,
                "direct_explicit_agreement": agreement,
                "disagreements": disagreements,
                "satisfying": satisfying,
                "coincidences": coincidences,
                "witness_checked": witness_checked,
                "witness_agreement": witness_agreement,
                "passed": agreement and witness_agreement,
            }
        ]
        _suite(report, "iso-sweep", cases)
        return report

    weights = parse_weight_selector(cfg.lam, cfg.n, cfg.l, cfg.seed)
    a_plus = parse_scalar(backend, cfg.a_plus, "a_plus")
    a_minus = parse_scalar(backend, cfg.a_minus, "a_minus")
    cases = []
    for lam in weights:
        direct = iso_direct(backend, cfg.n, lam, a_plus, a_minus)
        explicit = iso_explicit(backend, cfg.n, lam, a_plus, a_minus)
        witness = iso_witness(backend, cfg.n, lam, a_plus, a_minus)
        agree = direct.verdict == explicit.verdict == witness.verdict
        cases.append(
            {
                "lambda": list(lam),
                "a_plus": cfg.a_plus,
                "a_minus": cfg.a_minus,
                "direct": direct.to_dict(),
                "explicit": explicit.to_dict(),
                "witness": witness.to_dict(),
                "verdict": direct.verdict,
                "passed": agree,
            }
        )
    _suite(report, "iso-decision", cases)
    return report


def cmd_dump(cfg: RunConfig) -> dict:
    backend = make_backend(cfg.backend, cfg.l, cfg.tolerance)
    weights = parse_weight_selector(cfg.lam, cfg.n, cfg.l, cfg.seed)
    if len(weights) != 1:
        raise ConfigError("lambda: dump needs a single weight, not a selector")
    lam = weights[0]
    name = cfg.generator
    module = SchnizerModule(backend, cfg.n, lam)
    stem = name[:-4] if name.endswith("_inv") else name
    affine_zero = len(stem) > 1 and stem[0] in "efk" and stem[1:] == "0"
    if affine_zero:
        if cfg.sign == "both":
            raise ConfigError("sign: dumping an index-0 generator needs '+' or '-'")
        ev = EvaluationModule(module, parse_scalar(backend, cfg.a, "a"), cfg.sign)
        op = ev.generator(name, route=cfg.route)
    else:
        finite = module.finite_generator_map()
        if name not in finite:
            raise ConfigError(f"generator: unknown name {name!r} for rank {cfg.n}")
        op = finite[name]
    matrix = materialize(op, module)
    report = _skeleton("dump", cfg)
    report["config"]["generator"] = name
    report["config"]["route"] = cfg.route
    report["config"]["a"] = cfg.a
    cases = [
        {
            "generator": name,
            "route": cfg.route if affine_zero else None,
            "dimension": module.dimension,
            "basis": matrix.basis,
            "triplets": matrix.triplets(backend),
            "passed": True,
        }
    ]
    _suite(report, "dump", cases)
    return report


def _render_text(report: dict) -> str:
    lines = [
        f"qloop {report['tool']['version']} {report['command']}"
        f"  backend={report['config']['backend']} n={report['config']['n']} l={report['config']['l']}"
    ]
    warning = report["conventions"]["gcd_warning"]
    if warning:
        lines.append(f"warning: {warning}")
    for suite in report["suites"]:
        status = "PASS" if suite["passed"] else "FAIL"
        lines.append(f"suite {suite['name']}: {status} ({len(suite['cases'])} cases)")
        if not suite["passed"]:
            for case in suite["cases"]:
                if not case.get("passed", True):
                    summary = {
                        k: v
                        for k, v in case.items()
                        if k in ("lambda", "sign", "a", "a_plus", "a_minus")
                    }
                    lines.append(f"  failing case: {json.dumps(summary, sort_keys=True)}")
                    for failure in case.get("failures", [])[:3]:
                        lines.append(f"    {failure['relation']}")
                    break
    lines.append(f"RESULT: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "verify": cmd_verify,
    "drinfeld": cmd_drinfeld,
    "iso": cmd_iso,
    "dump": cmd_dump,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qloop",
        description="Exact construction and verification of root-of-unity evaluation modules.",
    )
    parser.add_argument("--version", action="version", version=f"qloop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML config file; flags override it")
    common.add_argument("--n", type=int, help="rank of the finite root system")
    common.add_argument("--l", type=int, help="odd order of the root of unity")
    common.add_argument(
        "--lambda", dest="lam", help="weight: comma list, 'all', or 'random:k'"
    )
    common.add_argument("--backend", choices=["exact", "float"])
    common.add_argument("--tolerance", type=float, help="float backend comparison tolerance")
    common.add_argument("--seed", type=int, help="seed for random weight selection")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--format", choices=["json", "text"])
    common.add_argument(
        "--timing", action="store_const", const=True,
        help="include wall-clock timing (breaks byte determinism)",
    )
    common.add_argument(
        "--strict-gcd", dest="strict_gcd", action="store_const", const=True,
        help="reject configurations with gcd(l, n+1) != 1",
    )

    p = sub.add_parser("verify", parents=[common], help="relation, nilpotency and kernel suites")
    p.add_argument("--level", help="comma list from {finite, affine}")
    p.add_argument("--sign", choices=["+", "-", "both"])
    p.add_argument("--a", help="spectral parameter for affine suites")
    p.add_argument(
        "--corrupt-action", dest="corrupt_action", action="store_const", const=True,
        help="self-test: corrupt one generator and expect failures",
    )

    p = sub.add_parser("drinfeld", parents=[common], help="classifying polynomials, both routes")
    p.add_argument("--sign", choices=["+", "-", "both"])
    p.add_argument("--a", help="spectral parameter")
    p.add_argument("--index", help="'support', 'all', or a single direction index")

    p = sub.add_parser("iso", parents=[common], help="isomorphism decision / sweep")
    p.add_argument("--a-plus", dest="a_plus", help="plus-structure spectral parameter")
    p.add_argument("--a-minus", dest="a_minus", help="minus-structure spectral parameter")
    p.add_argument(
        "--sweep", action="store_const", const=True,
        help="exhaustive (lambda, a) agreement sweep instead of one decision",
    )

    p = sub.add_parser("dump", parents=[common], help="sparse matrix of one generator")
    p.add_argument("--generator", help="name like e1, f0, k2, k1_inv")
    p.add_argument("--route", choices=["closed", "bracket", "literal"])
    p.add_argument("--sign", choices=["+", "-", "both"])
    p.add_argument("--a", help="spectral parameter for index-0 generators")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cli_values = {
        key: getattr(args, key) for key in vars(args) if key not in ("command", "config")
    }
    started = time.perf_counter()
    try:
        file_values = load_config_file(args.config) if args.config else None
        cfg = build_config(file_values, cli_values)
        needs_affine = args.command in ("drinfeld", "iso") or (
            args.command == "verify" and "affine" in cfg.levels
        )
        cfg.validate(needs_affine=needs_affine)
        report = _COMMANDS[args.command](cfg)
    except (ConfigError, RankTooSmallError) as exc:
        print(f"qloop: configuration error: {exc}", file=sys.stderr)
        return 2
    if cfg.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - started, 3)}
    if cfg.format == "text":
        rendered = _render_text(report)
    else:
        rendered = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
