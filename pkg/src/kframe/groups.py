"""Matrix groups defined by congruence with diag(k,1,1,1), and recovery of k.

The central objects are the groups O^k(4,R) of real 4x4 matrices A with
A^t I[k] A = I[k], where I[k] = diag(k,1,1,1).  The parameter k lives on the
circle obtained from the extended real line by collapsing both infinities to a
single point omega.  At the two degenerate values the datum I[0] = diag(0,1,1,1)
is preserved on the direct side (k = 0, upper-block-triangular group) or on the
inverse side (k = omega, the Galilei group), in both cases together with
det(A)^2 = 1.

Given transition matrices between measured frames, `classify` recovers the k
that makes all of them group members, or reports that k is arbitrary
(pure spatial rotations) or that no single k works.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import LogBranchFailure, SingularMatrix, SymmetryViolated

__all__ = [
    "KValue",
    "OMEGA",
    "kval",
    "k_equal",
    "BlockDecomp",
    "block_decompose",
    "matrix_inverse",
    "congruence_matrix",
    "satisfies_symmetry",
    "in_group",
    "KConstraint",
    "extract_k_candidates",
    "ClassifyResult",
    "classify",
    "GroupSpec",
    "congruence_spec",
    "generator_spec",
    "conjugated_spec",
    "ok_spec",
    "rotation_spec",
    "orthogonal_spec",
    "lie_algebra_basis",
    "group_membership",
    "principal_log",
    "random_group_element",
    "Speed",
    "speed_of_interactions",
    "group_label",
]

DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# k values on the circle [-inf, inf] / {+-inf -> omega}


@dataclass(frozen=True)
class KValue:
    """A point of the k-circle: a finite real, or None for the point omega."""

    value: float | None = None

    def __post_init__(self) -> None:
        if self.value is not None:
            v = float(self.value)
            if not np.isfinite(v):
                # +-inf are the same circle point; collapse to omega.
                object.__setattr__(self, "value", None)
            else:
                object.__setattr__(self, "value", v)

    @property
    def is_omega(self) -> bool:
        return self.value is None

    @property
    def finite(self) -> float:
        if self.value is None:
            raise ValueError("omega has no finite value")
        return self.value

    def __repr__(self) -> str:
        return "omega" if self.value is None else f"k={self.value:g}"


OMEGA = KValue(None)


def kval(k) -> KValue:
    """Coerce a float, the string 'omega', or a KValue to a KValue."""
    if isinstance(k, KValue):
        return k
    if isinstance(k, str):
        if k.strip().lower() == "omega":
            return OMEGA
        return KValue(float(k))
    return KValue(float(k))


def k_equal(a: KValue, b: KValue, tol: float = DEFAULT_TOL) -> bool:
    """Equality on the k-circle: omega matches only omega, finite values match
    within |k1 - k2| <= tol * (1 + max(|k1|, |k2|))."""
    a, b = kval(a), kval(b)
    if a.is_omega or b.is_omega:
        return a.is_omega and b.is_omega
    return abs(a.finite - b.finite) <= tol * (1.0 + max(abs(a.finite), abs(b.finite)))


# ---------------------------------------------------------------------------
# small dense matrices


def _as_square(A, n: int | None = None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if n is not None and A.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def matrix_inverse(A) -> np.ndarray:
    """Inverse of a small dense matrix; raises SingularMatrix below threshold.

    The threshold |det A| <= 1e-12 * max|A_ij|^n is scale invariant.
    """
    A = _as_square(A)
    n = A.shape[0]
    scale = float(np.max(np.abs(A)))
    det = float(np.linalg.det(A))
    if abs(det) <= 1e-12 * max(scale, 1e-300) ** n:
        raise SingularMatrix(f"|det A| = {abs(det):.3e} below threshold")
    return np.linalg.inv(A)


@dataclass(frozen=True)
class BlockDecomp:
    """1+3 block split of a 4x4 matrix: [[a00, a_h], [a_v^t, ahat]]."""

    a00: float
    a_h: np.ndarray  # top-right row, shape (3,)
    a_v: np.ndarray  # bottom-left column, shape (3,)
    ahat: np.ndarray  # lower-right 3x3 block

    def assemble(self) -> np.ndarray:
        A = np.empty((4, 4))
        A[0, 0] = self.a00
        A[0, 1:] = self.a_h
        A[1:, 0] = self.a_v
        A[1:, 1:] = self.ahat
        return A


def block_decompose(A) -> BlockDecomp:
    A = _as_square(A, 4)
    return BlockDecomp(float(A[0, 0]), A[0, 1:].copy(), A[1:, 0].copy(), A[1:, 1:].copy())


def congruence_matrix(k) -> np.ndarray:
    """The preserved datum I[k] = diag(k,1,1,1); diag(0,1,1,1) at omega."""
    k = kval(k)
    d = 0.0 if k.is_omega else k.finite
    return np.diag([d, 1.0, 1.0, 1.0])


def satisfies_symmetry(A, tol: float = DEFAULT_TOL) -> bool:
    """Observer symmetry condition: (A^-1)_00 = A_00 and the lower-right 3x3
    block of A^-1 equals the transpose of A's.  Off-diagonal blocks are free."""
    d = block_decompose(A)
    di = block_decompose(matrix_inverse(A))
    return (
        abs(di.a00 - d.a00) <= tol
        and float(np.max(np.abs(di.ahat - d.ahat.T))) <= tol
    )


def _det_squared_ok(A: np.ndarray, tol: float) -> bool:
    return abs(float(np.linalg.det(A)) ** 2 - 1.0) <= tol


def in_group(A, k, tol: float = DEFAULT_TOL, pto: bool = False) -> bool:
    """Membership in O^k(4,R).

    Finite k != 0: ||A^t I[k] A - I[k]||_inf <= tol (det^2 = 1 is implied).
    k = 0: the same congruence on A plus |det^2 A - 1| <= tol.
    k = omega: inverse-side congruence ||A^-1 I[0] A^-t - I[0]||_inf <= tol
    plus the det condition.  With pto, additionally A_00 > 0.
    """
    A = _as_square(A, 4)
    k = kval(k)
    Ainv = matrix_inverse(A)  # also enforces the invertibility precondition
    if k.is_omega:
        S = congruence_matrix(OMEGA)
        ok = float(np.max(np.abs(Ainv @ S @ Ainv.T - S))) <= tol and _det_squared_ok(A, tol)
    elif k.finite == 0.0:
        S = congruence_matrix(k)
        ok = float(np.max(np.abs(A.T @ S @ A - S))) <= tol and _det_squared_ok(A, tol)
    else:
        S = congruence_matrix(k)
        ok = float(np.max(np.abs(A.T @ S @ A - S))) <= tol
    if pto:
        ok = ok and A[0, 0] > 0.0
    return ok


# ---------------------------------------------------------------------------
# k-candidate constraints and classification


@dataclass(frozen=True)
class KConstraint:
    """Set of k values compatible with one transition matrix.

    tag is one of all / single / finiteSet / empty; `values` holds the members
    for single (exactly one) and finiteSet (two or more, deduplicated).
    """

    tag: str
    values: tuple[KValue, ...] = ()

    @staticmethod
    def all_k() -> "KConstraint":
        return KConstraint("all")

    @staticmethod
    def empty() -> "KConstraint":
        return KConstraint("empty")

    @staticmethod
    def single(k) -> "KConstraint":
        return KConstraint("single", (kval(k),))

    @staticmethod
    def finite_set(ks, tol: float = DEFAULT_TOL) -> "KConstraint":
        dedup: list[KValue] = []
        for k in (kval(x) for x in ks):
            if not any(k_equal(k, other, tol) for other in dedup):
                dedup.append(k)
        dedup.sort(key=lambda k: (k.is_omega, k.value if not k.is_omega else 0.0))
        if not dedup:
            return KConstraint.empty()
        if len(dedup) == 1:
            return KConstraint.single(dedup[0])
        return KConstraint("finiteSet", tuple(dedup))

    def intersect(self, other: "KConstraint", tol: float = DEFAULT_TOL) -> "KConstraint":
        if self.tag == "all":
            return other
        if other.tag == "all":
            return self
        if self.tag == "empty" or other.tag == "empty":
            return KConstraint.empty()
        common = [k for k in self.values if any(k_equal(k, o, tol) for o in other.values)]
        return KConstraint.finite_set(common, tol)


def extract_k_candidates(A, tol: float = DEFAULT_TOL) -> KConstraint:
    """Candidate k's for a single matrix, from the block relations between A
    and its inverse: for finite nonzero k, the inverse blocks satisfy
    tilde_a_h = a_v / k and tilde_a_v = k * a_h, so k falls out of
    componentwise ratios; vanished blocks select the degenerate values."""
    if not satisfies_symmetry(A, tol):
        raise SymmetryViolated("matrix violates the observer symmetry condition")
    A = _as_square(A, 4)
    d = block_decompose(A)
    di = block_decompose(matrix_inverse(A))
    a_h, a_v, t_h, t_v = d.a_h, d.a_v, di.a_h, di.a_v

    def small(x: np.ndarray) -> bool:
        return float(np.max(np.abs(x))) <= tol

    if small(a_h) and small(a_v) and small(t_h) and small(t_v):
        return KConstraint.all_k()
    if small(a_h) and small(t_h):
        return KConstraint.single(OMEGA) if in_group(A, OMEGA, tol) else KConstraint.empty()
    if small(a_v) and small(t_v):
        return KConstraint.single(0.0) if in_group(A, 0.0, tol) else KConstraint.empty()

    ratios = [t_v[i] / a_h[i] for i in range(3) if abs(a_h[i]) > tol]
    ratios += [a_v[j] / t_h[j] for j in range(3) if abs(t_h[j]) > tol]
    if not ratios:
        return KConstraint.empty()
    lo, hi = min(ratios), max(ratios)
    if hi - lo > tol * (1.0 + max(abs(lo), abs(hi))):
        return KConstraint.empty()
    k_hat = float(np.mean(ratios))
    return KConstraint.single(k_hat) if in_group(A, k_hat, tol) else KConstraint.empty()


@dataclass(frozen=True)
class ClassifyResult:
    """Outcome of classifying a set of transition matrices.

    tag: unique (k carries the value) / arbitrary / inconsistent / residual.
    """

    tag: str
    k: KValue | None = None
    candidates: tuple[KValue, ...] = ()
    diagnostics: tuple[str, ...] = ()


def classify(matrices, tol: float = DEFAULT_TOL, pto: bool = False) -> ClassifyResult:
    """Intersect the per-matrix k-constraints and confirm full membership."""
    mats = [_as_square(A, 4) for A in matrices]
    if not mats:
        raise ValueError("classification needs at least one matrix")
    constraint = KConstraint.all_k()
    for i, A in enumerate(mats):
        try:
            c = extract_k_candidates(A, tol)
        except (SingularMatrix, SymmetryViolated) as exc:
            return ClassifyResult("inconsistent", diagnostics=(f"matrix {i}: {exc}",))
        constraint = constraint.intersect(c, tol)
        if constraint.tag == "empty":
            return ClassifyResult(
                "inconsistent", diagnostics=(f"matrix {i}: empty candidate intersection",)
            )
    if constraint.tag == "all":
        return ClassifyResult("arbitrary")
    if constraint.tag == "finiteSet":
        return ClassifyResult("residual", candidates=constraint.values)
    k = constraint.values[0]
    for i, A in enumerate(mats):
        if not in_group(A, k, tol, pto):
            return ClassifyResult(
                "inconsistent", diagnostics=(f"matrix {i}: fails membership at {k!r}",)
            )
    return ClassifyResult("unique", k=k)


# ---------------------------------------------------------------------------
# group specifications and Lie algebra bases


@dataclass(frozen=True)
class GroupSpec:
    """Description of a matrix group.

    kind = congruence: matrices preserving the symmetric datum S, on the
    direct side (A^t S A = S) or the inverse side (A^-1 S A^-t = S), with an
    optional det^2 = 1 constraint.
    kind = generators: the group generated by a Lie-algebra basis.
    kind = conjugated: q G q^-1 for a base spec G and invertible q.
    """

    kind: str
    S: np.ndarray | None = None
    side: str = "direct"
    det_unit: bool = False
    generators: tuple[np.ndarray, ...] = ()
    base: "GroupSpec | None" = None
    conjugator: np.ndarray | None = None

    @property
    def dim(self) -> int:
        if self.kind == "congruence":
            return self.S.shape[0]
        if self.kind == "generators":
            return self.generators[0].shape[0]
        return self.base.dim


def congruence_spec(S, side: str = "direct", det_unit: bool = False) -> GroupSpec:
    S = _as_square(S)
    if float(np.max(np.abs(S - S.T))) > 0.0:
        raise ValueError("congruence datum must be symmetric")
    if side not in ("direct", "inverse"):
        raise ValueError(f"unknown congruence side {side!r}")
    return GroupSpec("congruence", S=S, side=side, det_unit=det_unit)


def generator_spec(generators) -> GroupSpec:
    gens = tuple(_as_square(g) for g in generators)
    if not gens:
        raise ValueError("generator spec needs at least one generator")
    stacked = np.stack([g.ravel() for g in gens])
    if np.linalg.matrix_rank(stacked) < len(gens):
        raise ValueError("generators must be linearly independent")
    return GroupSpec("generators", generators=gens)


def conjugated_spec(base: GroupSpec, conjugator) -> GroupSpec:
    q = _as_square(conjugator, base.dim)
    matrix_inverse(q)  # invertibility check
    return GroupSpec("conjugated", base=base, conjugator=q)


def ok_spec(k) -> GroupSpec:
    """GroupSpec for O^k(4,R) with the degenerate-value conventions."""
    k = kval(k)
    if k.is_omega:
        return congruence_spec(congruence_matrix(OMEGA), side="inverse", det_unit=True)
    if k.finite == 0.0:
        return congruence_spec(congruence_matrix(k), side="direct", det_unit=True)
    return congruence_spec(congruence_matrix(k), side="direct")


def rotation_spec() -> GroupSpec:
    """{1} x SO(3): spatial rotations fixing the time axis, in generator form."""
    gens = []
    for i, j in ((1, 2), (1, 3), (2, 3)):
        X = np.zeros((4, 4))
        X[i, j], X[j, i] = -1.0, 1.0
        gens.append(X)
    return generator_spec(gens)


def orthogonal_spec(m: int) -> GroupSpec:
    """SO(m) as a congruence spec (identity datum, det = 1)."""
    return congruence_spec(np.eye(m), det_unit=True)


def _orthonormal_rows(stacked: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span of `stacked`."""
    u, s, vt = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return vt[:rank]


def lie_algebra_basis(spec: GroupSpec) -> list[np.ndarray]:
    """Orthonormal basis of the group's Lie algebra.

    Congruence specs linearize to X^t S + S X = 0 (direct) or
    X S + S X^t = 0 (inverse), intersected with tr X = 0 when det^2 = 1 is
    part of the datum; the basis is the nullspace of the assembled system.
    """
    if spec.kind == "generators":
        rows = _orthonormal_rows(np.stack([g.ravel() for g in spec.generators]))
        return [row.reshape(spec.generators[0].shape) for row in rows]
    if spec.kind == "conjugated":
        q = spec.conjugator
        qinv = matrix_inverse(q)
        conj = [q @ X @ qinv for X in lie_algebra_basis(spec.base)]
        rows = _orthonormal_rows(np.stack([x.ravel() for x in conj]))
        return [row.reshape(q.shape) for row in rows]

    S = spec.S
    m = S.shape[0]
    cols = []
    for idx in range(m * m):
        E = np.zeros((m, m))
        E.flat[idx] = 1.0
        L = E.T @ S + S @ E if spec.side == "direct" else E @ S + S @ E.T
        cols.append(L.ravel())
    system = np.stack(cols, axis=1)
    if spec.det_unit:
        system = np.vstack([system, np.eye(m).ravel()[None, :]])
    null = scipy.linalg.null_space(system)
    return [null[:, i].reshape(m, m) for i in range(null.shape[1])]


def group_membership(spec: GroupSpec, A, tol: float = DEFAULT_TOL) -> bool:
    """Numerical membership test against a GroupSpec.

    Generator specs test membership of the identity component: the principal
    logarithm must exist and project onto the generator span within tol.
    """
    A = _as_square(A, spec.dim)
    if spec.kind == "congruence":
        S = spec.S
        if spec.side == "direct":
            ok = float(np.max(np.abs(A.T @ S @ A - S))) <= tol
        else:
            Ainv = matrix_inverse(A)
            ok = float(np.max(np.abs(Ainv @ S @ Ainv.T - S))) <= tol
        if spec.det_unit:
            ok = ok and _det_squared_ok(A, tol)
        return ok
    if spec.kind == "conjugated":
        qinv = matrix_inverse(spec.conjugator)
        return group_membership(spec.base, qinv @ A @ spec.conjugator, tol)

    try:
        X = principal_log(A)
    except (LogBranchFailure, SingularMatrix):
        return False
    rows = _orthonormal_rows(np.stack([g.ravel() for g in spec.generators]))
    x = X.ravel()
    resid = x - rows.T @ (rows @ x)
    return float(np.max(np.abs(resid))) <= tol * (1.0 + float(np.max(np.abs(X))))


def principal_log(A) -> np.ndarray:
    """Real principal matrix logarithm; fails on the negative real axis."""
    A = _as_square(A)
    eig = np.linalg.eigvals(A)
    if np.any((eig.real <= 1e-12) & (np.abs(eig.imag) <= 1e-12)):
        raise LogBranchFailure("eigenvalue on the closed negative real axis")
    X = scipy.linalg.logm(A)
    if np.max(np.abs(np.imag(X))) > 1e-8 * (1.0 + np.max(np.abs(X))):
        raise LogBranchFailure("logarithm is not real")
    return np.real(X)


def random_group_element(spec: GroupSpec, seed: int, scale: float = 0.5) -> np.ndarray:
    """exp(sum_i c_i X_i) with coefficients drawn deterministically from seed,
    |c_i| <= scale, over the spec's Lie-algebra basis."""
    basis = lie_algebra_basis(spec)
    if not basis:
        raise ValueError("group spec has an empty Lie algebra")
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-scale, scale, size=len(basis))
    X = sum(c * B for c, B in zip(coeffs, basis))
    return scipy.linalg.expm(X)


# ---------------------------------------------------------------------------
# the interaction-speed map


@dataclass(frozen=True)
class Speed:
    """Supremum of relative speeds between standard observers."""

    kind: str  # finite | infinite | zero | undefined
    c: float | None = None


def speed_of_interactions(k) -> Speed:
    k = kval(k)
    if k.is_omega:
        return Speed("infinite")
    if k.finite < 0.0:
        return Speed("finite", float(np.sqrt(-k.finite)))
    if k.finite == 0.0:
        return Speed("zero", 0.0)
    return Speed("undefined")


def group_label(result: ClassifyResult) -> str:
    """Human-readable group name for a classification outcome."""
    if result.tag == "arbitrary":
        return "{1}xO(3)"
    if result.tag != "unique":
        return "none"
    k = result.k
    if k.is_omega:
        return "Galilei"
    if k.finite < 0.0:
        return "Lorentz-conjugate"
    if k.finite == 0.0:
        return "dual"
    return "orthogonal-conjugate"
