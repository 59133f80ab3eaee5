"""
Coherence-based certificates.

This module contains:
- Mutual coherence and the weighted kernel bound it implies
- A priori recovery, uniqueness and stability conditions
- The a posteriori group-support test
- Lifted sparsity ratio bounds
"""

from analysis.certificates import (
    Check,
    PosterioriCheck,
    RecoveryCertificate,
    SparsityBounds,
    StabilityBounds,
    certify,
    certify_posteriori,
    ega_uniqueness,
    evaluate_conditions,
    format_certificate,
    lifted_support_size,
    sparsity_ratio_bounds,
)
from analysis.coherence import kernel_coherence_bound, mutual_coherence

__all__ = [
    "Check",
    "PosterioriCheck",
    "RecoveryCertificate",
    "SparsityBounds",
    "StabilityBounds",
    "certify",
    "certify_posteriori",
    "ega_uniqueness",
    "evaluate_conditions",
    "format_certificate",
    "kernel_coherence_bound",
    "lifted_support_size",
    "mutual_coherence",
    "sparsity_ratio_bounds",
]
