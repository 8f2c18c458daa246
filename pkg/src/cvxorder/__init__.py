"""Exact convex-order decisions for finitely supported measures on Q^d."""

from .measure import (
    DiscreteMeasure,
    MeasureError,
    barycenter,
    dirac,
    embed,
    normalize,
    paper_instance,
    project,
    triangle_instance,
    uniform,
)
from .order1d import check_convex_order_1d, majorizes, popoviciu_holds
from .ordernd import check_convex_order, evaluate_witness, paper_witness
from .projcert import certify_all_directions_2d, spot_check_directions

__version__ = "0.1.0"
