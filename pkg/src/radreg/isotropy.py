"""Radial-isotropic transformations and heavy-subspace detection.

A point set on the unit sphere is in gamma-approximate radial-isotropic
position when the normalized second-moment matrix (d/n) sum u_i u_i^T has
smallest eigenvalue at least 1 - gamma; equivalently, the quadratic form in
every unit direction is at least 1 - gamma. ``radial_isotropize`` searches
for a symmetric positive definite A whose normalized images achieve this via
the alternating normalization fixed point:

    u_i = A x_i / |A x_i|,   M = (d/n) sum u_i u_i^T,   A <- M^{-1/2} A.

The multiplicative update destroys symmetry, so after each step A is replaced
by its symmetric polar factor (A^T A)^{1/2}; this only rotates the images and
leaves the eigenvalue certificate unchanged.

No transform exists exactly when some k-dimensional subspace holds strictly
more than a k/d fraction of the points. When the iteration stalls, the
detector maps the dominant eigenvectors of M back through A^{-1}, snaps the
nearby points onto their own span, and verifies the count; a verified
subspace is correct regardless of how it was found. For d <= 6 an exhaustive
search over subspaces spanned by point subsets settles the question exactly.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, InsufficientPoints, RadregError
from .linalg import OrthonormalBasis, matrix_rank, span_basis

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.5
ANGULAR_TOL = 1e-6      # loose capture radius around a candidate subspace
MEMBER_RTOL = 1e-9      # strict membership: dist(x, V) <= MEMBER_RTOL * |x|
DETECT_EVERY = 25       # run the heavy-subspace detector every this many iters
EXHAUSTIVE_MAX_DIM = 6  # subset-span enumeration allowed up to this dimension


@dataclass
class RadialTransform:
    """Symmetric positive definite A plus convergence diagnostics."""

    matrix: np.ndarray
    gamma_achieved: float
    iterations_used: int
    log_condition_number: float

    def apply(self, points, labels=None):
        """Map (x, y) to (A x / |A x|, y / |A x|); returns images or a pair."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        V = X @ self.matrix.T
        norms = np.linalg.norm(V, axis=1)
        U = V / norms[:, None]
        if labels is None:
            return U
        return U, np.asarray(labels, dtype=float) / norms

    def to_json(self):
        return {
            "gamma_achieved": self.gamma_achieved,
            "iterations_used": self.iterations_used,
            "log_condition_number": self.log_condition_number,
        }


@dataclass
class HeavySubspace:
    """A subspace holding strictly more than dim/d of the (nonzero) points."""

    basis: OrthonormalBasis
    fraction: float
    member_mask: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self):
        return self.basis.size

    @property
    def ambient_dim(self):
        return self.basis.ambient_dim


def second_moment(points):
    """Normalized second moment (d/n) sum of unit-row outer products."""
    U = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = U.shape
    return (d / n) * (U.T @ U)


def min_isotropy_eig(points):
    """Smallest eigenvalue of the normalized second moment of unit rows."""
    return float(np.linalg.eigvalsh(second_moment(points))[0])


def _unit_rows(points):
    X = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0.0):
        raise ContractViolation("zero vector among input points")
    return X / norms[:, None]


def _sym_polar(A):
    """Symmetric polar factor (A^T A)^{1/2} and its extreme singular values."""
    _, sig, Vt = np.linalg.svd(A)
    return (Vt.T * sig) @ Vt, sig[0], sig[-1]


def _verify_candidate(Xu, directions):
    """Snap points near span(directions) onto their own span and verify it is
    heavy. Returns a HeavySubspace or None; a non-None result is always a
    certified answer."""
    n, d = Xu.shape
    try:
        cand = span_basis(directions.T)
    except ContractViolation:
        return None
    loose = cand.distance(Xu) <= ANGULAR_TOL
    if not loose.any():
        return None
    fitted = span_basis(Xu[loose])
    if fitted.size >= d:
        return None
    strict = fitted.distance(Xu) <= MEMBER_RTOL
    if not strict.any():
        return None
    refit = span_basis(Xu[strict])
    if refit.size >= d:
        return None
    members = refit.distance(Xu) <= MEMBER_RTOL
    count, k = int(members.sum()), refit.size
    if count * d > k * n:  # strict fraction test in integer arithmetic
        return HeavySubspace(refit, count / n, member_mask=members)
    return None


def _detect_heavy(Xu, A, M):
    """Try every top-k eigenspace of M, mapped back through A, as a candidate."""
    n, d = Xu.shape
    _, evecs = np.linalg.eigh(M)  # ascending; heavy mass sits in the top end
    for k in range(1, d):
        top = evecs[:, d - k:]
        back = np.linalg.solve(A, top)
        found = _verify_candidate(Xu, back)
        if found is not None:
            return found
    return None


def _exhaustive_heavy(Xu):
    """Exact search over subspaces spanned by point subsets (desk scale)."""
    n, d = Xu.shape
    best = None
    for k in range(1, d):
        for subset in itertools.combinations(range(n), k):
            basis = span_basis(Xu[list(subset)])
            r = basis.size
            if r < k:
                continue  # span already enumerated at its true size
            members = basis.distance(Xu) <= MEMBER_RTOL
            count = int(members.sum())
            if count * d > r * n:
                cand = HeavySubspace(basis, count / n, member_mask=members)
                if best is None or cand.fraction - cand.dim / d > best.fraction - best.dim / d:
                    best = cand
        if best is not None:
            return best
    return None


def default_max_iters(d, gamma):
    return 10 * d * math.ceil(math.log(1.0 / gamma)) + 1000


def certifying_gamma(n, d):
    """Isotropy gap that rules out every heavy subspace once surpassed.

    A k-dimensional subspace holding fraction f of n points caps the
    reachable lambda_min at d(1-f)/(d-k): the subspace image always carries
    at least d*f of the trace mass, leaving at most d(1-f) for the other
    d-k eigenvalues. With f > k/d by at least one point this cap is at most
    1 - d/(n(d-1)), so reaching lambda_min above that certifies that no
    heavy subspace exists. Returned with a factor-2 margin; d = 1 has no
    proper nonzero subspace, so any gap certifies.
    """
    if d < 2:
        return DEFAULT_GAMMA
    return d / (2.0 * n * (d - 1))


def radial_isotropize(points, gamma=DEFAULT_GAMMA, max_iters=None):
    """Find a gamma-approximate radial-isotropic transform or a heavy subspace.

    Points are unit-normalized internally (label co-scaling is the caller's
    job). On success returns a RadialTransform whose recomputed images
    satisfy lambda_min(M) >= 1 - gamma; on structural failure returns a
    verified HeavySubspace.
    """
    if not 0.0 < gamma < 1.0:
        raise ContractViolation(f"gamma must lie in (0, 1), got {gamma}")
    Xu = _unit_rows(points)
    n, d = Xu.shape
    if n < d:
        raise InsufficientPoints(f"need at least d={d} points, got {n}")
    rank = matrix_rank(Xu)
    if rank < d:
        basis = span_basis(Xu)
        members = basis.distance(Xu) <= MEMBER_RTOL
        return HeavySubspace(basis, 1.0, member_mask=members)
    if max_iters is None:
        max_iters = default_max_iters(d, gamma)

    A = np.eye(d)
    sig_max = sig_min = 1.0
    target = 1.0 - gamma
    for it in range(max_iters + 1):
        V = Xu @ A.T
        norms = np.linalg.norm(V, axis=1)
        U = V / norms[:, None]
        M = (d / n) * (U.T @ U)
        evals, evecs = np.linalg.eigh(M)
        if evals[0] >= target:
            return RadialTransform(
                matrix=A,
                gamma_achieved=max(0.0, 1.0 - float(evals[0])),
                iterations_used=it,
                log_condition_number=float(np.log(sig_max / sig_min)),
            )
        degenerate = evals[0] <= 1e-13 * max(evals[-1], 1.0)
        if degenerate or it % DETECT_EVERY == DETECT_EVERY - 1 or it == max_iters:
            found = _detect_heavy(Xu, A, M)
            if found is not None:
                return found
            if degenerate or it == max_iters:
                if d <= EXHAUSTIVE_MAX_DIM:
                    found = _exhaustive_heavy(Xu)
                    if found is not None:
                        return found
                raise RadregError(
                    f"no transform reached gamma={gamma} within {max_iters} "
                    "iterations and no heavy subspace could be verified"
                )
        B = (evecs * (1.0 / np.sqrt(np.maximum(evals, 1e-300)))) @ evecs.T
        A, sig_max, sig_min = _sym_polar(B @ A)
    raise AssertionError("unreachable")


def check_forster_condition(points, d=None):
    """Exact existence test by enumerating subspaces spanned by point subsets.

    Returns (satisfiable, witness): satisfiable is True when every
    k-dimensional subspace holds at most a k/d fraction of the points, in
    which case arbitrarily good transforms exist; otherwise witness is a
    HeavySubspace certifying non-existence. Desk scale only.
    """
    Xu = _unit_rows(points)
    if d is not None and d != Xu.shape[1]:
        raise ContractViolation(f"points live in dim {Xu.shape[1]}, not {d}")
    witness = _exhaustive_heavy(Xu)
    return witness is None, witness


def find_heavy_subspace(points, d=None, max_iters=None):
    """Locate a heavy subspace, or return None when none exists.

    Runs the isotropy fixed point past the certifying gap of
    ``certifying_gamma``; convergence certifies absence. A stalled iteration
    falls back on eigenspace candidates, then on exhaustive search for
    d <= 6. For d > 6 a stall without a verified subspace returns None with
    a logged warning.
    """
    Xu = _unit_rows(points)
    if d is not None and d != Xu.shape[1]:
        raise ContractViolation(f"points live in dim {Xu.shape[1]}, not {d}")
    n, dim = Xu.shape
    if dim == 1:
        return None  # the only proper subspace is {0}, which holds no point
    if matrix_rank(Xu) < dim:
        basis = span_basis(Xu)
        members = basis.distance(Xu) <= MEMBER_RTOL
        return HeavySubspace(basis, 1.0, member_mask=members)
    try:
        result = radial_isotropize(Xu, certifying_gamma(n, dim), max_iters)
    except (ContractViolation, InsufficientPoints):
        raise
    except RadregError as exc:
        # stalled without a verified subspace; for dim <= 6 the exhaustive
        # search already ran inside radial_isotropize and found nothing
        if dim > EXHAUSTIVE_MAX_DIM:
            logger.warning("heavy-subspace search inconclusive: %s", exc)
        return None
    return result if isinstance(result, HeavySubspace) else None
