"""Programmatic entry points behind the CLI: decompose-and-verify on an
instance, span certificates, and deterministic random instances.
"""

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import TypeISubalgebraSpec, algebra_dimension, complement_basis
from .decompose import (
    RECON_TOL,
    TERM_TOL,
    Decomposition,
    VerificationReport,
    type_one_decomp,
    verify_decomposition,
)
from .errors import UnsupportedConfiguration
from .linalg import RANK_TOL, gram_rank, hs_norm
from .serialize import decomposition_to_json, instance_to_json, spec_to_json


def report_within(rep: VerificationReport, recon_tol: float, term_tol: float) -> bool:
    return (
        rep.recon_residual <= recon_tol
        and rep.max_unitarity_residual <= term_tol
        and rep.max_membership_residual <= term_tol
    )


def run_decompose(spec: TypeISubalgebraSpec, matrix,
                  recon_tol: float = RECON_TOL, term_tol: float = TERM_TOL):
    """Project ``matrix`` onto the complement, decompose and verify it.

    Returns ``(doc, ok)`` where ``doc`` is the serializable result document
    (terms, verification report, projection residual) and ``ok`` says
    whether every residual is within tolerance.
    """
    x = algebra.complement_project(spec, matrix)
    projection_residual = algebra.membership_residual(spec, matrix)
    d = type_one_decomp(spec, x, in_tol=1e-6)
    rep = verify_decomposition(spec, x, d)
    ok = report_within(rep, recon_tol, term_tol)
    doc = decomposition_to_json(d, rep)
    doc["projection_residual"] = float(projection_residual)
    if projection_residual > 1e-9 * max(1.0, hs_norm(matrix)):
        doc["warning"] = (
            "input was not in the complement; its projection was decomposed"
        )
    return doc, ok


@dataclass(frozen=True)
class SpanCertificate:
    """Numerical witness that the produced unitaries span the complement."""

    spec: TypeISubalgebraSpec
    basis_size: int
    pooled_unitary_count: int
    gram_rank: int
    expected_rank: int
    passed: bool
    residual_summary: VerificationReport

    def to_json(self) -> dict:
        return {
            "n": int(self.spec.dimension),
            "spec": spec_to_json(self.spec),
            "basis_size": self.basis_size,
            "pooled_unitary_count": self.pooled_unitary_count,
            "gram_rank": self.gram_rank,
            "expected_rank": self.expected_rank,
            "pass": self.passed,
            "residual_summary": {
                "recon_residual": float(self.residual_summary.recon_residual),
                "max_unitarity_residual": float(
                    self.residual_summary.max_unitarity_residual
                ),
                "max_membership_residual": float(
                    self.residual_summary.max_membership_residual
                ),
                "term_count": int(self.residual_summary.term_count),
                "coeff_sum": float(self.residual_summary.coeff_sum),
            },
        }


def run_spancert(spec: TypeISubalgebraSpec, rank_tol: float = RANK_TOL,
                 recon_tol: float = RECON_TOL, term_tol: float = TERM_TOL) -> SpanCertificate:
    """Decompose a whole complement basis and certify the span of the
    pooled unitaries: its Gram rank must equal ``n**2 - dim A`` exactly."""
    n = spec.dimension
    cls = algebra.validate_spec(spec, n)
    if not cls.supported:
        raise UnsupportedConfiguration(cls.reason or "unsupported", cls.detail)
    basis = complement_basis(spec, rank_tol=rank_tol)
    expected = n * n - algebra_dimension(spec)
    pool = []
    worst = VerificationReport(0.0, 0.0, 0.0, 0, 0.0)
    ok = True
    for b in basis:
        d = type_one_decomp(spec, b, in_tol=1e-8)
        rep = verify_decomposition(spec, b, d)
        ok = ok and report_within(rep, recon_tol, term_tol)
        pool.extend(t.unitary for t in d.terms)
        worst = VerificationReport(
            max(worst.recon_residual, rep.recon_residual),
            max(worst.max_unitarity_residual, rep.max_unitarity_residual),
            max(worst.max_membership_residual, rep.max_membership_residual),
            worst.term_count + rep.term_count,
            max(worst.coeff_sum, rep.coeff_sum),
        )
    rank = gram_rank(pool, rank_tol=rank_tol) if pool else 0
    passed = ok and rank == expected
    return SpanCertificate(
        spec, len(basis), len(pool), rank, expected, passed, worst
    )


def run_random_instance(spec: TypeISubalgebraSpec, seed: int) -> dict:
    """Deterministic Gaussian complement instance, ready to serialize."""
    n = spec.dimension
    cls = algebra.validate_spec(spec, n)
    if not cls.supported:
        raise UnsupportedConfiguration(cls.reason or "unsupported", cls.detail)
    x = algebra.random_complement_element(spec, seed)
    return instance_to_json(spec, x, seed=seed)


def reverify(spec, target, d: Decomposition, stored: VerificationReport,
             match_tol: float = 1e-12,
             recon_tol: float = RECON_TOL, term_tol: float = TERM_TOL):
    """Re-verify a stored decomposition and compare against its stored report.

    Returns ``(report, matches_stored, ok)``.
    """
    rep = verify_decomposition(spec, target, d)
    matches = (
        abs(rep.recon_residual - stored.recon_residual) <= match_tol
        and abs(rep.max_unitarity_residual - stored.max_unitarity_residual) <= match_tol
        and abs(rep.max_membership_residual - stored.max_membership_residual) <= match_tol
        and rep.term_count == stored.term_count
        and abs(rep.coeff_sum - stored.coeff_sum) <= match_tol * max(1.0, stored.coeff_sum)
    )
    return rep, matches, report_within(rep, recon_tol, term_tol)


def random_hermitian(n: int, seed: int) -> np.ndarray:
    """Deterministic Gaussian Hermitian matrix (Philox-keyed)."""
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0x48], dtype=np.uint64)))
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return (g + g.conj().T) / 2
