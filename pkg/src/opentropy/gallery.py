"""Named operator specs covering every family the examples use."""

from __future__ import annotations

import numpy as np

from .measure import Measure
from .operators import OperatorSpec

__all__ = ["gallery", "GALLERY_SIZE"]

GALLERY_SIZE = 32


def gallery():
    """Dict ``name -> OperatorSpec``; all entries truncate to at least 32."""
    geo = Measure.geometric(0.5)
    uni = Measure.uniform(GALLERY_SIZE)
    c1 = Measure.condit1()
    cyc = list(range(1, GALLERY_SIZE)) + [0]
    phases = np.exp(2j * np.pi * np.arange(GALLERY_SIZE) / 7)
    return {
        "diagonal_contraction": OperatorSpec.diagonal(0.9 ** np.arange(GALLERY_SIZE), geo),
        "diagonal_unitary": OperatorSpec.diagonal(phases, uni),
        "koopman_cycle": OperatorSpec.koopman(cyc, uni),
        "koopman_condit1": OperatorSpec.koopman([0, 1, 2, 4, 5, 3, 6, 8, 9, 10, 7], c1),
        "indicator": OperatorSpec.indicator(range(0, GALLERY_SIZE, 3), geo),
        "shift_right": OperatorSpec("shift_right", {}, geo),
        "two_band_D": OperatorSpec("two_band_D", {}, geo),
        "column_A": OperatorSpec("column_A", {"b": [0.25, 0.25, 0.2, 0.15, 0.15]}, geo),
        "hankel_B": OperatorSpec("hankel_B", {"alpha": [0.3, 0.2, 0.2, 0.1, 0.1, 0.05]}, geo),
        "block_sizes": OperatorSpec.block_balpha(sizes=[1, 2, 2, 3, 5, 8, 13], measure=geo),
        "block_constant": OperatorSpec.block_balpha(rule="constant", n=3, measure=geo),
        "block_pow2_condit1": OperatorSpec.block_balpha(rule="pow2", measure=c1),
        "composed": OperatorSpec(
            "composed",
            {"factors": [{"kind": "diagonal", "values": [0.5] * GALLERY_SIZE}, {"kind": "koopman", "perm": cyc}]},
            uni,
        ),
    }
