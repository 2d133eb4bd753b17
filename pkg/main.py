#!/usr/bin/env python3
"""
Bratteli Splitting Toolkit

Entry point for the command-line tool.
"""
import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from core.absorption import ABSORPTION_FORMAT, AbsorptionError, TransportFailure, UnsupportedQ, run_absorption
from core.config import RunConfig
from core.diagram import (
    DiagramError, HorizonExhausted, Subdiagram, TelescopePlan, counting_inequality_violations,
    counting_telescope, is_simple_at_horizon, telescope, validate
)
from core.loader import (
    LoaderError, get_diagram_info, load_certificate, load_diagram, load_json,
    parse_q_sequence, parse_relation_sequence, save_json
)
from core.measures import invariant_weightings
from core.oracle import (
    SKIPPED, CertificateView, CheckResult, OracleError, OracleReport, check_absorption,
    check_lemma_clauses, check_main1, check_measure, check_minimality_approx, mutation_sweep
)
from core.paths import CylinderSet, PartitionError, PathCapExceeded
from core.render import BASE_COLOR, REPLICA_COLOR, save_dot, to_dot
from core.reporter import ReportData, generate_pdf_report, generate_preview_text, save_class_size_plot
from core.splitting import SplittingError, run_splitting

logger = logging.getLogger("bratteli")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3


def _exit_code(reports: List[OracleReport]) -> int:
    if not all(report.passed for report in reports):
        return EXIT_FAIL
    if any(result.status == SKIPPED and result.name == "minimality" and "exhausted" in result.detail
           for report in reports for result in report.results):
        return EXIT_EXHAUSTED
    return EXIT_PASS


def _minimality(view: CertificateView, resolution: int) -> OracleReport:
    try:
        return check_minimality_approx(view, resolution)
    except HorizonExhausted as e:
        report = OracleReport("minimality", {"resolution": resolution, "depth": view.source_depth})
        report.add(CheckResult("minimality", SKIPPED, f"exhausted at {e.stage}: {e}"))
        return report


def _split_reports(view: CertificateView, config: RunConfig) -> List[OracleReport]:
    return [
        check_lemma_clauses(view, config.slack),
        check_main1(view),
        _minimality(view, config.resolution),
        check_measure(view, config.samples, config.seed),
    ]


def _write_report(data: ReportData, config: RunConfig):
    save_json(data.to_dict(), os.path.join(config.out, "report.json"))
    if config.pdf:
        plot_path = os.path.join(config.out, "class_sizes.png")
        save_class_size_plot(data.class_sizes, plot_path)
        data.class_size_plot_path = plot_path
        with open(os.path.join(config.out, "report.md"), "w", encoding="utf-8") as handle:
            handle.write(generate_preview_text(data))
        generate_pdf_report(data, os.path.join(config.out, "report.pdf"))


def cmd_validate(config: RunConfig) -> int:
    """Structural validation plus simplicity and counting diagnostics"""
    diagram, sub, metadata = load_diagram(config.inputs[0], config.depth, check=False)
    report = validate(diagram, sub)
    result = {"source": metadata["source"], "validation": report.to_dict()}
    if report.passed:
        simplicity = is_simple_at_horizon(diagram)
        result["simplicity"] = {
            "simple": simplicity.simple,
            "witnesses": {str(n): m for n, m in simplicity.witnesses.items()},
            "failed_level": simplicity.failed_level,
        }
        result["counting_violations"] = [list(v) for v in counting_inequality_violations(diagram, sub)]
        logger.info(get_diagram_info(diagram, sub))
        logger.info(simplicity.get_summary())
    save_json(result, os.path.join(config.out, "validation.json"))
    logger.info("validation: %s", report.get_summary())
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_telescope(config: RunConfig) -> int:
    diagram, sub, _ = load_diagram(config.inputs[0], config.depth)
    plan = TelescopePlan(config.plan) if config.plan else counting_telescope(diagram, sub)
    result = telescope(diagram, plan, sub)
    save_json({"diagram": result.diagram.to_dict(), "subdiagram": result.sub.to_dict(), "plan": plan.to_list()},
              os.path.join(config.out, "telescoped.json"))
    logger.info("telescoped along %s: %s", plan.to_list(), get_diagram_info(result.diagram, result.sub))
    return EXIT_PASS


def cmd_split(config: RunConfig) -> int:
    diagram, sub, metadata = load_diagram(config.inputs[0], config.depth)
    spec = config.relation or metadata.get("S") or "diagonal"
    sequence = parse_relation_sequence(spec, diagram, sub)
    context = run_splitting(diagram, sub, sequence, config.cap)
    certificate = context.to_certificate()
    save_json(certificate, os.path.join(config.out, "split_certificate.json"))

    view = CertificateView(certificate, config.cap)
    data = ReportData.from_view(view, certificate, metadata["source"])
    data.reports = _split_reports(view, config)
    _write_report(data, config)
    for report in data.reports:
        logger.info(report.get_summary())
    return _exit_code(data.reports)


def cmd_absorb(config: RunConfig) -> int:
    diagram, sub, metadata = load_diagram(config.inputs[0], config.depth)
    spec = config.relation or metadata.get("Q") or "tail"
    q = parse_q_sequence(spec, diagram, sub)
    result = run_absorption(diagram, sub, q, config.copies, config.cap)
    certificate = result.to_certificate()
    save_json(certificate, os.path.join(config.out, "absorption_certificate.json"))

    report = check_absorption(certificate, config.cap)
    view = CertificateView(certificate["split"], config.cap)
    data = ReportData.from_view(view, certificate["split"], metadata["source"])
    data.certificate_format = ABSORPTION_FORMAT
    data.reports = [report]
    _write_report(data, config)
    logger.info(report.get_summary())
    return _exit_code(data.reports)


def cmd_verify(config: RunConfig) -> int:
    """Re-verify a certificate from its serialized data only"""
    certificate = load_certificate(config.inputs[0])
    source = os.path.basename(config.inputs[0])
    if certificate.get("format") == ABSORPTION_FORMAT:
        split = certificate["split"]
        view = CertificateView(split, config.cap)
        data = ReportData.from_view(view, split, source)
        data.certificate_format = ABSORPTION_FORMAT
        data.reports = [check_absorption(certificate, config.cap)] + _split_reports(view, config)
    else:
        view = CertificateView(certificate, config.cap)
        data = ReportData.from_view(view, certificate, source)
        data.reports = _split_reports(view, config)
        if config.mutations:
            data.mutation = mutation_sweep(certificate, config.mutations, config.seed, config.slack, config.cap)
    _write_report(data, config)
    for report in data.reports:
        logger.info(report.get_summary())
    code = _exit_code(data.reports)
    if data.mutation is not None and data.mutation.escaped and code == EXIT_PASS:
        code = EXIT_FAIL
    return code


def cmd_measures(config: RunConfig) -> int:
    diagram, sub, _ = load_diagram(config.inputs[0], config.depth)
    polytope = invariant_weightings(diagram)
    result = polytope.to_dict()
    result["y_cylinder_measures"] = {
        str(n): [str(w.measure(diagram, CylinderSet.y_cylinder(diagram, sub, n))) for w in polytope.vertices]
        for n in range(1, diagram.depth + 1)
    }
    save_json(result, os.path.join(config.out, "measures.json"))
    logger.info("invariant weightings: %s", polytope.get_summary())
    return EXIT_PASS


def cmd_render(config: RunConfig) -> int:
    source = config.certificate or config.inputs[0]
    record: Optional[Dict] = None
    if source.endswith(".json"):
        record = load_json(source)
    if record is not None and "format" in record:
        absorbed = record["format"] == ABSORPTION_FORMAT
        split = record["split"] if absorbed else record
        diagram = CertificateView(split, config.cap).diagram
        sub = Subdiagram.from_dict(diagram, split["subdiagram"])
        if absorbed:
            base = Subdiagram.from_dict(diagram, record["base"]["subdiagram"])
            layers = [(base, BASE_COLOR), (sub, REPLICA_COLOR)]
        else:
            layers = [(sub, BASE_COLOR)]
        dot = to_dot(diagram, layers, os.path.basename(source))
    else:
        diagram, sub, metadata = load_diagram(source, config.depth)
        dot = to_dot(diagram, [(sub, BASE_COLOR)], metadata["name"])
    save_dot(dot, os.path.join(config.out, "diagram.dot"))
    return EXIT_PASS


COMMANDS = {
    "validate": cmd_validate,
    "telescope": cmd_telescope,
    "split": cmd_split,
    "absorb": cmd_absorb,
    "verify": cmd_verify,
    "measures": cmd_measures,
    "render": cmd_render,
}


def _plan(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"plan must be comma-separated levels, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="main.py", description="Splitting and absorption on Bratteli diagrams")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, *options: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("input", help="diagram JSON, certificate JSON, or fixture:<name>")
        sub.add_argument("--out", default="output", help="output directory")
        sub.add_argument("--cap", type=int, default=RunConfig.cap, help="path cap")
        if "depth" in options:
            sub.add_argument("--depth", type=int, help="truncation depth N")
        if "checks" in options:
            sub.add_argument("--slack", type=int, default=RunConfig.slack)
            sub.add_argument("--resolution", type=int, default=RunConfig.resolution)
            sub.add_argument("--samples", type=int, default=RunConfig.samples)
            sub.add_argument("--seed", type=int, default=RunConfig.seed)
            sub.add_argument("--pdf", action="store_true", help="also write report.md, report.pdf and a plot")
        return sub

    add("validate", "check structural invariants", "depth")
    telescope_parser = add("telescope", "telescope along a plan or the counting plan", "depth")
    group = telescope_parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--plan", type=_plan)
    group.add_argument("--counting", action="store_true")
    split_parser = add("split", "run the splitting construction", "depth", "checks")
    split_parser.add_argument("--relation", choices=["diagonal", "tail", "full"])
    absorb_parser = add("absorb", "run the absorption construction", "depth", "checks")
    absorb_parser.add_argument("--copies", type=int, default=RunConfig.copies)
    absorb_parser.add_argument("--relation", choices=["diagonal", "tail", "full"])
    verify_parser = add("verify", "re-verify a certificate", "checks")
    verify_parser.add_argument("--mutations", type=int, default=0, help="lambda flips to sample")
    add("measures", "exact invariant weightings", "depth")
    render_parser = add("render", "write a layered DOT drawing", "depth")
    render_parser.add_argument("--certificate", help="render a certificate instead of INPUT")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(inputs=[args.input], out=args.out, cap=args.cap, verbose=args.verbose)
    for name in ("depth", "slack", "resolution", "samples", "seed", "pdf", "copies", "relation", "plan",
                 "certificate", "mutations"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    return config.validate()


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = build_config(args)
        return COMMANDS[args.command](config)
    except HorizonExhausted as e:
        logger.error("exhausted at %s: %s", e.stage or "search", e)
        return EXIT_EXHAUSTED
    except (LoaderError, DiagramError, PartitionError, PathCapExceeded, UnsupportedQ, OracleError, ValueError) as e:
        logger.error("input error: %s", e)
        return EXIT_INPUT
    except TransportFailure as e:
        logger.error("verification failure: %s", e)
        return EXIT_FAIL
    except AbsorptionError as e:
        logger.error("input error: %s", e)
        return EXIT_INPUT
    except SplittingError as e:
        logger.error("construction failed %s", e)
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
