"""Type I subalgebras of ``M_n(C)`` in standard position.

A subalgebra spec describes ``A = (+)_i M_{k_i} (x) ((+)_j C*1_{m_ij})``
laid out block by block.  Within block ``i`` the basis index is
``a*s_i + offset_j + t`` with ``a`` the factor index (outermost), ``j`` the
atom and ``t`` the multiplicity index, where ``s_i = sum_j m_ij``.  This
factor-major ordering is part of the file-format contract.

An optional conjugating unitary ``W`` places the algebra in general
position (``A = W A_std W*``); every computation runs in standard position
and conjugates at the boundary.

The trace-preserving conditional expectation acts atom by atom: the
compression to an atom, viewed in ``M_k (x) M_m``, is replaced by its
normalized partial trace over the multiplicity factor tensored with the
identity.  Everything off-block or off-atom maps to zero.
"""

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, UnispanError
from .linalg import RANK_TOL, as_matrix, hs_inner, hs_norm, unitarity_residual


@dataclass(frozen=True)
class BlockSpec:
    """One central block ``M_k (x) ((+)_j C*1_{m_j})``."""

    k: int
    atom_mults: tuple

    def __post_init__(self):
        object.__setattr__(self, "atom_mults", tuple(int(m) for m in self.atom_mults))
        if self.k < 1:
            raise UnispanError(f"factor size must be >= 1, got {self.k}")
        if len(self.atom_mults) < 1:
            raise UnispanError("each block needs at least one atom")
        if any(m < 1 for m in self.atom_mults):
            raise UnispanError("atom multiplicities must be >= 1")

    @property
    def s(self) -> int:
        """Dimension of the abelian carrier, ``sum_j m_j``."""
        return sum(self.atom_mults)

    @property
    def dim(self) -> int:
        return self.k * self.s


@dataclass(frozen=True, eq=False)
class TypeISubalgebraSpec:
    """Structural description of a type I subalgebra in standard position."""

    blocks: tuple
    conjugation: Optional[np.ndarray] = None

    def __post_init__(self):
        blocks = tuple(
            b if isinstance(b, BlockSpec) else BlockSpec(*b) for b in self.blocks
        )
        if not blocks:
            raise UnispanError("spec needs at least one block")
        object.__setattr__(self, "blocks", blocks)
        if self.conjugation is not None:
            w = as_matrix(self.conjugation)
            if w.shape[0] != self.dimension:
                raise DimensionMismatch(
                    f"conjugation is {w.shape[0]}x{w.shape[0]}, "
                    f"spec dimension is {self.dimension}"
                )
            if unitarity_residual(w) > 1e-10:
                raise UnispanError("conjugation matrix is not unitary")
            w = w.copy()
            w.setflags(write=False)
            object.__setattr__(self, "conjugation", w)

    @property
    def dimension(self) -> int:
        """Ambient matrix dimension ``n``."""
        return sum(b.dim for b in self.blocks)

    @classmethod
    def masa(cls, n: int) -> "TypeISubalgebraSpec":
        """The diagonal masa of ``M_n``."""
        return cls(blocks=(BlockSpec(1, (1,) * n),))

    @classmethod
    def scalar(cls, m: int) -> "TypeISubalgebraSpec":
        """The scalars ``C*1_m`` inside ``M_m``."""
        return cls(blocks=(BlockSpec(1, (m,)),))

    @classmethod
    def atoms(cls, ranks: Sequence[int]) -> "TypeISubalgebraSpec":
        """An atomic abelian subalgebra ``(+)_j C*1_{r_j}``."""
        return cls(blocks=(BlockSpec(1, tuple(ranks)),))

    @classmethod
    def of_blocks(cls, pairs, conjugation=None) -> "TypeISubalgebraSpec":
        """Build from ``[(k, [m, ...]), ...]`` pairs."""
        return cls(
            blocks=tuple(BlockSpec(k, tuple(ms)) for k, ms in pairs),
            conjugation=conjugation,
        )

    def digest(self) -> int:
        """Stable 64-bit digest of the layout, used to key random streams."""
        parts = ["|".join(f"{b.k}:{','.join(map(str, b.atom_mults))}" for b in self.blocks)]
        h = hashlib.blake2b("".join(parts).encode(), digest_size=8)
        if self.conjugation is not None:
            h.update(np.ascontiguousarray(self.conjugation).tobytes())
        return int.from_bytes(h.digest(), "big")


class AtomLayout(NamedTuple):
    """Index layout of one atom ``M_k (x) C*1_m`` inside the ambient space.

    ``indices`` lists the carrier indices in factor-major ``(a, t)`` order,
    so the compression of a matrix to ``indices`` is literally an element of
    ``M_k (x) M_m``.
    """

    block: int
    atom: int
    k: int
    m: int
    dim: int
    indices: np.ndarray


def atom_layouts(spec: TypeISubalgebraSpec) -> list:
    """Per-atom index layout in standard position."""
    out = []
    offset = 0
    for bi, b in enumerate(spec.blocks):
        s = b.s
        atom_off = 0
        for ji, m in enumerate(b.atom_mults):
            idx = np.array(
                [offset + a * s + atom_off + t for a in range(b.k) for t in range(m)],
                dtype=np.intp,
            )
            out.append(AtomLayout(bi, ji, b.k, m, b.k * m, idx))
            atom_off += m
        offset += b.dim
    return out


def algebra_dimension(spec: TypeISubalgebraSpec) -> int:
    """Linear dimension of the subalgebra, ``sum_i k_i**2 * d_i``."""
    return sum(b.k**2 * len(b.atom_mults) for b in spec.blocks)


class ClassKind(Enum):
    C1_MASA = "c1"
    C2_SINGLE_ATOM = "c2"
    C3_ATOMIC_ABELIAN = "c3"
    C4_HOMOGENEOUS_TYPE1 = "c4"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True, eq=False)
class SpecClass:
    """Classification of a spec into a supported construction envelope."""

    kind: ClassKind
    n: int
    atoms: tuple
    algebra_dim: int
    reason: Optional[str] = None
    detail: str = ""

    @property
    def supported(self) -> bool:
        return self.kind is not ClassKind.UNSUPPORTED


def validate_spec(spec: TypeISubalgebraSpec, n: int) -> SpecClass:
    """Check the layout against the ambient dimension and classify the spec.

    Envelope rules:

    * C1: every ``k = 1`` and every ``m = 1`` (the diagonal masa).
    * C2: exactly one atom, ``m`` even ``>= 2`` (covers ``C*1_m`` at
      ``k = 1``).
    * C3: every ``k = 1``, at least two atoms, each multiplicity 1 or even,
      and every even atom leaves at least two ambient dimensions to pad
      against.
    * C4: at least two atoms of one common dimension ``k*m``, each
      multiplicity 1 or even, and every even atom has a paddable remainder.
    * anything else is UNSUPPORTED, with a machine-readable ``reason``.
    """
    atoms = tuple(atom_layouts(spec))
    dim = spec.dimension
    if dim != n:
        raise DimensionMismatch(f"spec covers dimension {dim}, ambient is {n}")
    adim = algebra_dimension(spec)

    def unsupported(rule, detail=""):
        return SpecClass(ClassKind.UNSUPPORTED, n, atoms, adim, rule, detail)

    all_k1 = all(a.k == 1 for a in atoms)
    if all_k1 and all(a.m == 1 for a in atoms):
        return SpecClass(ClassKind.C1_MASA, n, atoms, adim)
    if len(atoms) == 1:
        a = atoms[0]
        if a.m >= 2 and a.m % 2 == 0:
            return SpecClass(ClassKind.C2_SINGLE_ATOM, n, atoms, adim)
        if a.m == 1:
            return unsupported(
                "single-full-matrix-atom",
                "the lone atom is a full matrix block; the complement is {0}",
            )
        return unsupported("odd-atom-rank", f"single atom of odd multiplicity {a.m}")
    bad = [a for a in atoms if a.m >= 3 and a.m % 2 == 1]
    if bad:
        a = bad[0]
        return unsupported(
            "odd-atom-rank", f"atom (block {a.block}, atom {a.atom}) has multiplicity {a.m}"
        )
    if all_k1:
        for a in atoms:
            if a.m >= 2 and n - a.dim < 2:
                return unsupported(
                    "isolated-even-atom",
                    f"even atom of rank {a.m} leaves only {n - a.dim} "
                    "dimension(s) to pad against",
                )
        return SpecClass(ClassKind.C3_ATOMIC_ABELIAN, n, atoms, adim)
    dims = {a.dim for a in atoms}
    if len(dims) > 1:
        return unsupported(
            "heterogeneous-atom-dimensions", f"atom dimensions {sorted(dims)} differ"
        )
    if len(atoms) == 2:
        for a, other in ((atoms[0], atoms[1]), (atoms[1], atoms[0])):
            if a.m >= 2 and other.m == 1:
                return unsupported(
                    "no-padding-partner",
                    "the remaining atom is a full matrix block and carries "
                    "no complement unitary",
                )
    return SpecClass(ClassKind.C4_HOMOGENEOUS_TYPE1, n, atoms, adim)


def _expect_standard(spec: TypeISubalgebraSpec, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for a in atom_layouts(spec):
        sub = x[np.ix_(a.indices, a.indices)].reshape(a.k, a.m, a.k, a.m)
        partial = np.einsum("atbt->ab", sub) / a.m
        out[np.ix_(a.indices, a.indices)] = np.kron(partial, np.eye(a.m))
    return out


def conditional_expectation(spec: TypeISubalgebraSpec, x) -> np.ndarray:
    """Trace-preserving conditional expectation of ``x`` onto the subalgebra."""
    x = as_matrix(x)
    if x.shape[0] != spec.dimension:
        raise DimensionMismatch(
            f"matrix is {x.shape[0]}x{x.shape[0]}, spec covers {spec.dimension}"
        )
    w = spec.conjugation
    if w is None:
        return _expect_standard(spec, x)
    return w @ _expect_standard(spec, w.conj().T @ x @ w) @ w.conj().T


def complement_project(spec: TypeISubalgebraSpec, x) -> np.ndarray:
    """Orthogonal projection onto the complement: ``x - E(x)``."""
    x = as_matrix(x)
    return x - conditional_expectation(spec, x)


def membership_residual(spec: TypeISubalgebraSpec, x) -> float:
    """``||E(x)||_2``; zero certifies that ``x`` lies in the complement."""
    return hs_norm(conditional_expectation(spec, x))


def complement_basis(spec: TypeISubalgebraSpec, rank_tol: float = RANK_TOL) -> list:
    """HS-orthonormal basis of the complement.

    Projects the matrix units through the complement projection and runs
    modified Gram-Schmidt (with one re-orthogonalization pass), dropping
    vectors of norm below ``rank_tol``.  The result has exactly
    ``n**2 - algebra_dimension(spec)`` elements.
    """
    n = spec.dimension
    basis = []
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=np.complex128)
            unit[i, j] = 1.0
            v = complement_project(spec, unit)
            for _ in range(2):
                for b in basis:
                    v = v - hs_inner(v, b) * b
            norm = hs_norm(v)
            if norm > rank_tol:
                basis.append(v / norm)
    expected = n * n - algebra_dimension(spec)
    if len(basis) != expected:
        raise ArithmeticError(
            f"complement basis has {len(basis)} elements, expected {expected}"
        )
    return basis


def _rng_for(spec: TypeISubalgebraSpec, seed: int, stream: int) -> np.random.Generator:
    key = np.array(
        [np.uint64(seed), np.uint64((spec.digest() + stream) % (1 << 64))],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def _standard_normal_complex(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_algebra_element(spec: TypeISubalgebraSpec, seed: int) -> np.ndarray:
    """Pseudorandom element of the subalgebra, deterministic per (spec, seed).

    Counter-based generator (Philox) keyed by the seed and a digest of the
    layout, so parallel trials are reproducible.
    """
    rng = _rng_for(spec, seed, 0)
    n = spec.dimension
    out = np.zeros((n, n), dtype=np.complex128)
    for a in atom_layouts(spec):
        y = _standard_normal_complex(rng, (a.k, a.k))
        out[np.ix_(a.indices, a.indices)] = np.kron(y, np.eye(a.m))
    w = spec.conjugation
    if w is not None:
        out = w @ out @ w.conj().T
    return out


def random_complement_element(spec: TypeISubalgebraSpec, seed: int) -> np.ndarray:
    """Pseudorandom Gaussian matrix projected onto the complement."""
    rng = _rng_for(spec, seed, 1)
    n = spec.dimension
    g = _standard_normal_complex(rng, (n, n))
    return complement_project(spec, g)
