"""Core package for the Bratteli Splitting Toolkit"""
from .diagram import (
    BratteliDiagram, Subdiagram, Edge, DiagramError, HorizonExhausted,
    validate, is_simple_at_horizon, path_counts, TelescopePlan, telescope,
    counting_telescope, thinness_telescope_search
)
from .paths import (
    SubrelationPartition, TailRelation, CylinderSet, CylinderFunction,
    PartitionError, PathCapExceeded, enumerate_paths, y_paths, tail_relation
)
from .splitting import SplitContext, SplittingError, run_splitting
from .absorption import AbsorptionError, AbsorptionResult, QSequence, UnsupportedQ, TransportFailure, run_absorption
from .measures import InvariantWeighting, WeightingPolytope, invariant_weightings
from .oracle import (
    CertificateView, OracleReport, check_lemma_clauses, check_main1,
    check_minimality_approx, check_measure, check_absorption, mutation_sweep
)
from .loader import load_diagram, load_certificate, LoaderError, get_diagram_info
from .reporter import ReportData, generate_preview_text, generate_pdf_report, save_class_size_plot
from .render import to_dot
from .fixtures import FIXTURES, load_fixture

__all__ = [
    'BratteliDiagram', 'Subdiagram', 'Edge', 'DiagramError', 'HorizonExhausted',
    'validate', 'is_simple_at_horizon', 'path_counts', 'TelescopePlan', 'telescope',
    'counting_telescope', 'thinness_telescope_search',
    'SubrelationPartition', 'TailRelation', 'CylinderSet', 'CylinderFunction',
    'PartitionError', 'PathCapExceeded', 'enumerate_paths', 'y_paths', 'tail_relation',
    'SplitContext', 'SplittingError', 'run_splitting',
    'AbsorptionError', 'AbsorptionResult', 'QSequence', 'UnsupportedQ', 'TransportFailure', 'run_absorption',
    'InvariantWeighting', 'WeightingPolytope', 'invariant_weightings',
    'CertificateView', 'OracleReport', 'check_lemma_clauses', 'check_main1',
    'check_minimality_approx', 'check_measure', 'check_absorption', 'mutation_sweep',
    'load_diagram', 'load_certificate', 'LoaderError', 'get_diagram_info',
    'ReportData', 'generate_preview_text', 'generate_pdf_report', 'save_class_size_plot',
    'to_dot', 'FIXTURES', 'load_fixture',
]
