"""
Bratteli Splitting Toolkit - Report Generator
Markdown and PDF verification reports with class-size plots and check tables
"""
import logging
import os
from typing import Dict, List, Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Image, PageBreak, Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from .oracle import FAIL, PASS, CertificateView, MutationReport, OracleReport

logger = logging.getLogger(__name__)

STATUS_COLORS = {PASS: "#27ae60", FAIL: "#c0392b"}
MAX_TABLE_ROWS = 20


class ReportData:
    """Container for report data"""

    def __init__(self):
        self.source = None
        self.certificate_format = None

        # Diagram
        self.depth = 0
        self.path_count = 0
        self.y_count = 0
        self.plans: Dict[str, List[int]] = {}

        # Split levels
        self.u_depths: Dict[int, int] = {}
        self.class_sizes: Dict[int, List[int]] = {}

        # Checks
        self.reports: List[OracleReport] = []
        self.mutation: Optional[MutationReport] = None

        self.class_size_plot_path = None

    @classmethod
    def from_view(cls, view: CertificateView, certificate: Dict, source: str) -> "ReportData":
        data = cls()
        data.source = source
        data.certificate_format = certificate.get("format")
        data.depth = view.depth
        data.path_count = len(view.universe)
        data.y_count = len(view.ys)
        data.plans = dict(certificate.get("plans", {}))
        data.u_depths = {n: u.depth for n, u in view.u_sets.items()}
        data.class_sizes = {n: view.rprimes[n].class_sizes() for n in sorted(view.rprimes)}
        return data

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def to_dict(self) -> Dict:
        """JSON form; nothing run-dependent, so reruns are byte-identical"""
        return {
            "source": self.source,
            "format": self.certificate_format,
            "status": PASS if self.passed else FAIL,
            "depth": self.depth,
            "path_count": self.path_count,
            "y_count": self.y_count,
            "plans": self.plans,
            "u_depths": {str(n): d for n, d in self.u_depths.items()},
            "class_counts": {str(n): len(sizes) for n, sizes in self.class_sizes.items()},
            "reports": [report.to_dict() for report in self.reports],
            "mutation": self.mutation.to_dict() if self.mutation else None,
        }


def generate_preview_text(data: ReportData) -> str:
    """
    Generate markdown preview text for a verification report.

    Args:
        data: ReportData object

    Returns:
        Formatted preview text
    """
    lines = []

    lines.append("# Bratteli Splitting Verification Report")
    lines.append("")
    lines.append(f"**Certificate:** {data.source or 'N/A'} ({data.certificate_format or 'unknown format'})")
    lines.append(f"**Verdict:** {'PASS' if data.passed else 'FAIL'}")
    lines.append("")

    lines.append("## Diagram")
    lines.append(f"- **Depth:** {data.depth}")
    lines.append(f"- **Paths:** {data.path_count:,}")
    lines.append(f"- **Y-paths:** {data.y_count:,}")
    for name, plan in data.plans.items():
        lines.append(f"- **{name.capitalize()} plan:** {plan}")
    lines.append("")

    if data.class_sizes:
        lines.append("## Split Levels")
        lines.append("")
        lines.append("| n | U depth | R' classes | largest class |")
        lines.append("|--:|--------:|-----------:|--------------:|")
        for n, sizes in data.class_sizes.items():
            u_depth = data.u_depths.get(n, "-")
            lines.append(f"| {n} | {u_depth} | {len(sizes):,} | {max(sizes, default=0):,} |")
        lines.append("")

    for report in data.reports:
        lines.append(f"## {report.title.capitalize()}")
        lines.append("")
        lines.append("| Check | Status | Detail |")
        lines.append("|:------|:------:|:-------|")
        for result in report.results:
            detail = result.detail
            if result.witness is not None:
                detail += f" (witness: {result.witness})"
            lines.append(f"| {result.name} | {result.status} | {detail} |")
        lines.append("")

    if data.mutation is not None:
        lines.append("## Mutation Sweep")
        lines.append(f"- **Sampled:** {data.mutation.total}")
        lines.append(f"- **Unobservable:** {data.mutation.unobservable}")
        lines.append(f"- **Detected:** {data.mutation.detected} of {data.mutation.observable}")
        lines.append("")

    return "\n".join(lines)


def _styled_table(rows: List[List[str]], header_color: str, widths: List[float]) -> Table:
    table = Table(rows, colWidths=[w * inch for w in widths])
    table.setStyle(TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor(header_color)),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, -1), 9),
        ('GRID', (0, 0), (-1, -1), 1, colors.black),
        ('BACKGROUND', (0, 1), (-1, -1), colors.beige)
    ]))
    return table


def generate_pdf_report(data: ReportData, output_path: str):
    """
    Generate PDF report with ReportLab.

    Args:
        data: ReportData object
        output_path: Path to save PDF
    """
    # invariant pins the PDF creation date and document id
    doc = SimpleDocTemplate(output_path, pagesize=letter, invariant=True)
    story = []
    styles = getSampleStyleSheet()

    title_style = ParagraphStyle(
        'CustomTitle',
        parent=styles['Heading1'],
        fontSize=24,
        textColor=colors.HexColor('#2c3e50'),
        spaceAfter=30,
        alignment=TA_CENTER
    )
    heading_style = ParagraphStyle(
        'CustomHeading',
        parent=styles['Heading2'],
        fontSize=14,
        textColor=colors.HexColor('#34495e'),
        spaceAfter=12,
        spaceBefore=12
    )

    story.append(Spacer(1, 2*inch))
    story.append(Paragraph("Bratteli Splitting Verification Report", title_style))
    story.append(Spacer(1, 0.5*inch))
    story.append(Paragraph(
        f"Certificate: {data.source or 'N/A'} ({data.certificate_format or 'unknown format'})", styles['Normal']
    ))
    verdict = PASS if data.passed else FAIL
    story.append(Paragraph(
        f"Verdict: <font color='{STATUS_COLORS[verdict]}'><b>{verdict.upper()}</b></font>", styles['Normal']
    ))
    story.append(PageBreak())

    story.append(Paragraph("Diagram", heading_style))
    diagram_rows = [
        ['Property', 'Value'],
        ['Certificate', data.source or 'N/A'],
        ['Depth', str(data.depth)],
        ['Paths', f'{data.path_count:,}'],
        ['Y-paths', f'{data.y_count:,}'],
    ]
    diagram_rows += [[f'{name.capitalize()} plan', str(plan)] for name, plan in data.plans.items()]
    story.append(_styled_table(diagram_rows, '#3498db', [2, 4]))
    story.append(Spacer(1, 0.3*inch))

    if data.class_sizes:
        story.append(Paragraph("Split Levels", heading_style))
        level_rows = [['n', 'U depth', "R' classes", 'Largest class']]
        for n, sizes in list(data.class_sizes.items())[:MAX_TABLE_ROWS]:
            level_rows.append([str(n), str(data.u_depths.get(n, '-')), f'{len(sizes):,}', f'{max(sizes, default=0):,}'])
        story.append(_styled_table(level_rows, '#e67e22', [0.5, 1, 1.5, 1.5]))
        story.append(Spacer(1, 0.3*inch))

        if data.class_size_plot_path and os.path.exists(data.class_size_plot_path):
            story.append(Paragraph("Class Sizes", heading_style))
            story.append(Image(data.class_size_plot_path, width=5*inch, height=3*inch))
            story.append(Spacer(1, 0.3*inch))

    for report in data.reports:
        story.append(Paragraph(report.title.capitalize(), heading_style))
        rows = [['Check', 'Status', 'Detail']]
        for result in report.results:
            rows.append([result.name, result.status, Paragraph(result.detail, styles['Normal'])])
        story.append(_styled_table(rows, '#9b59b6', [1.5, 0.8, 4.2]))
        story.append(Spacer(1, 0.3*inch))

    if data.mutation is not None:
        story.append(Paragraph("Mutation Sweep", heading_style))
        mutation_rows = [
            ['Statistic', 'Value'],
            ['Sampled', str(data.mutation.total)],
            ['Unobservable', str(data.mutation.unobservable)],
            ['Detected', f'{data.mutation.detected} of {data.mutation.observable}'],
        ]
        story.append(_styled_table(mutation_rows, '#27ae60', [2, 2]))

    doc.build(story)
    logger.info("wrote PDF report %s", output_path)


def save_class_size_plot(class_sizes: Dict[int, List[int]], output_path: str):
    """
    Save a plot of R'_n class counts and mean class sizes per level.

    Args:
        class_sizes: Class sizes of R'_n keyed by n
        output_path: Path to save image
    """
    levels = sorted(class_sizes)
    counts = np.array([len(class_sizes[n]) for n in levels])
    means = np.array([np.mean(class_sizes[n]) if class_sizes[n] else 0.0 for n in levels])

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.bar(levels, counts, color='steelblue', edgecolor='black', alpha=0.7, label="R' classes")
    ax.set_xlabel('Level n', fontsize=12)
    ax.set_ylabel('Number of classes', fontsize=12)
    ax.set_yscale('log')

    twin = ax.twinx()
    twin.plot(levels, means, color='red', linestyle='--', linewidth=2, marker='o', label='Mean class size')
    twin.set_ylabel('Mean class size', fontsize=12)

    ax.set_title("Classes of R'_n by level", fontsize=14, fontweight='bold')
    handles = ax.get_legend_handles_labels()[0] + twin.get_legend_handles_labels()[0]
    ax.legend(handles, [h.get_label() for h in handles], fontsize=10)
    ax.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
