"""ReLU parameter recovery: separation oracle, ellipsoid method, and the
transformed subgradient-descent experiment.

The l1 loss of a ReLU model is non-convex, so instead of direct minimization
the search runs a central-cut ellipsoid method. The separation oracle accepts
a query that already fits a majority of the samples; otherwise it restricts
to the closed positive halfspace of the query, puts those covariates in
radial-isotropic position, and returns the back-transformed rescaled-l1
subgradient direction as a cutting hyperplane. When the positive-side points
concentrate on a subspace the oracle recurses: first inside the subspace,
then (if the inside check accepts) on the deflated complement.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset
from .errors import ContractViolation, HalfspaceEmpty, NoRecovery, RadregError
from .isotropy import DEFAULT_GAMMA, RadialTransform, certifying_gamma, radial_isotropize
from .l1 import FIT_RTOL, exact_fit_mask, snap_to_rational
from .linalg import inv_sqrt_psd, orthonormal_complement

BOUNDARY_RTOL = 1e-12  # half-space test: w.x >= -BOUNDARY_RTOL * |x| * max(1, |w|)


def _relu(t):
    return np.maximum(t, 0.0)


def relu_l1_loss(samples, w):
    """Mean absolute ReLU residual and its subgradient.

    The subgradient uses sgn(0) = 0 and treats the kink w.x = 0 as inactive,
    so a fitted point and a point on the kink both contribute nothing.
    """
    X, y = samples.x, samples.y
    w = np.asarray(w, dtype=float)
    z = X @ w
    pred = _relu(z)
    resid = pred - y
    loss = float(np.mean(np.abs(resid)))
    active = (z > 0.0).astype(float)
    grad = (X * (np.sign(resid) * active)[:, None]).mean(axis=0)
    return loss, grad


def positive_side_mask(X, w):
    """Closed halfspace w.x >= 0 with a relative slack band at the boundary."""
    norms = np.linalg.norm(X, axis=1)
    slack = BOUNDARY_RTOL * norms * max(1.0, float(np.linalg.norm(w)))
    return (X @ w >= -slack) & (norms > 0.0)


@dataclass
class EllipsoidConfig:
    """Search ball radius, termination radius, and certification tolerance.

    ``initial_radius`` must upper-bound |w*|. ``delta_min`` defaults to
    1e-9 * initial_radius; the operative stopping rule is the majority-fit
    check of the snapped center, so delta_min is only a safety net.
    ``max_denominator`` encodes the caller's bit-complexity knowledge of the
    target: snapping resolves exactly once the center is within
    1/(2*max_denominator^2) of it.
    """

    initial_radius: float
    delta_min: float | None = None
    fit_tol: float = FIT_RTOL
    max_steps: int | None = None
    gamma: float = DEFAULT_GAMMA
    max_denominator: int = 10**6

    def __post_init__(self):
        if self.initial_radius <= 0:
            raise ContractViolation("initial_radius must be positive")
        if self.delta_min is None:
            self.delta_min = 1e-9 * self.initial_radius
        if self.delta_min <= 0:
            raise ContractViolation("delta_min must be positive")

    def resolved_max_steps(self, d):
        if self.max_steps is not None:
            return self.max_steps
        shrink = math.log(self.initial_radius / self.delta_min)
        return int(math.ceil(2.0 * (d + 1) * d * shrink)) + 100


@dataclass
class SepResult:
    """Either acceptance or a separating hyperplane through the query.

    For a hyperplane, ``normal`` g satisfies g.(w0 - w) > 0 for every w in a
    ball around the target, so the cut keeps {w : g.w <= offset} where
    offset = g.w0.
    """

    accepted: bool
    normal: np.ndarray | None = None
    offset: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_yes(self):
        return self.accepted


def sep_oracle(samples, w0, config, _depth=0):
    """Separation oracle for the ReLU l1 landscape at query w0.

    Accepts when ReLU(w0 . x) fits at least half the samples within fit_tol.
    Otherwise cuts using the rescaled subgradient of the positive-side
    points; on subspace concentration, recurses as described in the module
    docstring. Raises HalfspaceEmpty when no sample lies on the closed
    positive side (the halfspace-mass assumption is violated).
    """
    X, y = samples.x, samples.y
    m, d = X.shape
    w0 = np.asarray(w0, dtype=float)
    fits = int(exact_fit_mask(_relu(X @ w0), y, config.fit_tol).sum())
    if 2 * fits >= m:
        return SepResult(True, diagnostics={"fit_count": fits, "depth": _depth})

    mask = positive_side_mask(X, w0)
    if not mask.any():
        raise HalfspaceEmpty(
            f"no sample on the closed positive side of the query at depth {_depth}"
        )
    XS, yS = X[mask], y[mask]
    n_S = XS.shape[0]
    # recurse iff a heavy subspace exists (see linear.py for the rationale)
    gamma_eff = min(config.gamma, certifying_gamma(n_S, d))
    result = radial_isotropize(XS, gamma_eff)
    if isinstance(result, RadialTransform):
        U = result.apply(XS)
        sgn = np.sign(XS @ w0 - yS)
        r = (U * sgn[:, None]).mean(axis=0)
        g = np.linalg.solve(result.matrix, r)
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0.0:
            raise RadregError(
                "separation oracle produced a zero direction (every "
                "positive-side residual is zero but the majority check failed)"
            )
        return SepResult(
            False,
            normal=g,
            offset=float(g @ w0),
            diagnostics={
                "depth": _depth,
                "n_positive_side": n_S,
                "fit_count": fits,
                "transform": result.to_json(),
                "transform_matrix": result.matrix,  # for instrumented tests
                "positive_mask": mask,
                "r_norm": float(np.linalg.norm(r)),
            },
        )

    heavy = result
    B = heavy.basis.vectors
    members = heavy.member_mask
    inner = sep_oracle(
        LabeledDataset(XS[members] @ B, yS[members]), B.T @ w0, config, _depth + 1
    )
    if not inner.is_yes:
        g = B @ inner.normal
        return SepResult(
            False, normal=g, offset=float(g @ w0),
            diagnostics={"depth": _depth, "lifted_from": "V",
                         "heavy_dim": heavy.dim, "inner": inner.diagnostics},
        )
    rest = ~members
    if not rest.any():
        # every positive-side point lies in V and the inside check accepted
        return SepResult(True, diagnostics={"depth": _depth, "vacuous_complement": True})
    C = orthonormal_complement(heavy.basis).vectors
    y_defl = yS[rest] - (XS[rest] @ B) @ (B.T @ w0)
    outer = sep_oracle(
        LabeledDataset(XS[rest] @ C, y_defl), C.T @ w0, config, _depth + 1
    )
    if not outer.is_yes:
        g = C @ outer.normal
        return SepResult(
            False, normal=g, offset=float(g @ w0),
            diagnostics={"depth": _depth, "lifted_from": "Vperp",
                         "heavy_dim": heavy.dim, "inner": outer.diagnostics},
        )
    return SepResult(True, diagnostics={"depth": _depth, "both_recursions_accepted": True})


@dataclass
class EllipsoidState:
    """Ellipsoid {w : (w - center)^T shape^{-1} (w - center) <= 1}.

    ``volume_log`` is 0.5 * logdet(shape), the log-volume up to the constant
    of the unit ball, which cancels in all decrease checks.
    """

    center: np.ndarray
    shape: np.ndarray

    @property
    def volume_log(self):
        sign, logdet = np.linalg.slogdet(self.shape)
        if sign <= 0:
            return -math.inf
        return 0.5 * logdet

    @property
    def radius(self):
        return float(np.sqrt(max(np.linalg.eigvalsh(self.shape)[-1], 0.0)))


def ellipsoid_cut(state, normal):
    """Central cut keeping {w : normal . w <= normal . center}."""
    c, P = state.center, state.shape
    d = c.shape[0]
    Pg = P @ normal
    denom = float(normal @ Pg)
    if not denom > 0.0:
        raise NoRecovery("cut direction has non-positive ellipsoid norm",
                         {"state": state})
    b = Pg / math.sqrt(denom)
    c_new = c - b / (d + 1)
    if d == 1:
        P_new = P / 4.0
    else:
        P_new = (d * d / (d * d - 1.0)) * (P - (2.0 / (d + 1)) * np.outer(b, b))
        P_new = 0.5 * (P_new + P_new.T)
    return EllipsoidState(c_new, P_new)


def ellipsoid_recover_relu(samples, config, record_volumes=False):
    """Exact ReLU parameter recovery by the ellipsoid method.

    At every step the snapped center is tested against the majority-fit
    certificate first; the oracle is only consulted when that fails. Raises
    NoRecovery (with the final state in ``diagnostics``) when steps or the
    ellipsoid radius run out, and lets HalfspaceEmpty propagate.
    """
    from .linear import RecoveryReport  # local import avoids a cycle at import time

    X, y = samples.x, samples.y
    m, d = X.shape
    state = EllipsoidState(
        center=np.zeros(d),
        shape=config.initial_radius ** 2 * np.eye(d),
    )
    max_steps = config.resolved_max_steps(d)
    volumes = [state.volume_log] if record_volumes else None
    # try coarse denominators first: a simpler rational reaches the majority
    # certificate from a farther center, and the certificate itself is what
    # makes any candidate trustworthy
    ladder = [10**k for k in range(math.ceil(math.log10(config.max_denominator)))]
    ladder.append(config.max_denominator)
    for step in range(max_steps):
        for denominator in ladder:
            snapped = snap_to_rational(state.center, denominator)
            ws = snapped.to_floats()
            fit_mask = exact_fit_mask(_relu(X @ ws), y, config.fit_tol)
            if 2 * int(fit_mask.sum()) >= m:
                diagnostics = {"steps": step, "final_radius": state.radius}
                if record_volumes:
                    diagnostics["volume_logs"] = volumes
                return RecoveryReport(
                    w_hat=state.center.copy(),
                    w_snapped=snapped,
                    inlier_fraction=float(fit_mask.mean()),
                    recursion_trace=[],
                    majority_certified=True,
                    model="relu",
                    diagnostics=diagnostics,
                )
        result = sep_oracle(samples, state.center, config)
        if result.is_yes:
            raise NoRecovery(
                "oracle accepted the center but its snapped value failed the "
                "majority certificate; max_denominator may not match the "
                "target's bit complexity",
                {"state": state, "steps": step, "oracle": result.diagnostics},
            )
        state = ellipsoid_cut(state, result.normal)
        if record_volumes:
            volumes.append(state.volume_log)
        if state.radius < config.delta_min:
            raise NoRecovery(
                f"ellipsoid radius {state.radius:.3e} fell below delta_min "
                f"without a certified parameter",
                {"state": state, "steps": step + 1},
            )
    raise NoRecovery(
        f"no certified parameter within {max_steps} steps",
        {"state": state, "steps": max_steps},
    )


# --- transformed subgradient descent -----------------------------------------

GD_MODES = ("original", "normalized", "isotropic", "radial-isotropic")


@dataclass
class GdStep:
    iteration: int
    w: np.ndarray
    distance: float
    loss: float
    skipped: bool = False


def gd_relu_transformed(samples, mode, alpha=None, iters=100, w_init=None,
                        w_star=None, gamma=DEFAULT_GAMMA):
    """Constant-step subgradient descent on the ReLU l1 loss, with the data
    transform recomputed from the positive-side points at every iteration.

    Modes: 'original' (identity), 'normalized' (per-point x/|x|, y/|x|),
    'isotropic' (second-moment whitening), 'radial-isotropic' (the full
    alternating-normalization transform). The update follows the oracle:
    w' = A^{-1} w, then w <- w - alpha * A grad L'(w'), where L' is the l1
    loss of the linear model on the transformed positive-side points.

    ``alpha`` defaults to 1 for transformed modes and 1/mean(|x|^2) for
    'original' (keeping raw-point step magnitudes comparable to unit-norm
    ones). Returns the trajectory as a list of GdStep records; iterations
    with an empty positive side or a degenerate transform keep w and are
    flagged ``skipped``.
    """
    if mode not in GD_MODES:
        raise ContractViolation(f"mode must be one of {GD_MODES}, got {mode!r}")
    if iters < 1:
        raise ContractViolation("iters must be >= 1")
    X, y = samples.x, samples.y
    m, d = X.shape
    w = np.zeros(d) if w_init is None else np.asarray(w_init, dtype=float).copy()
    if alpha is None:
        alpha = 1.0 if mode != "original" else 1.0 / float(np.mean(np.sum(X * X, axis=1)))

    trajectory = []
    for it in range(iters):
        mask = positive_side_mask(X, w)
        skipped = False
        if not mask.any():
            skipped = True
        else:
            Xp, yp = X[mask], y[mask]
            A = None
            if mode == "normalized":
                norms = np.linalg.norm(Xp, axis=1)
                Xt, yt = Xp / norms[:, None], yp / norms
            elif mode == "isotropic":
                try:
                    A = inv_sqrt_psd((Xp.T @ Xp) / Xp.shape[0])
                    Xt, yt = Xp @ A.T, yp
                except RadregError:
                    skipped = True
            elif mode == "radial-isotropic":
                iso = radial_isotropize(Xp, gamma)
                if isinstance(iso, RadialTransform):
                    A = iso.matrix
                    Xt, yt = iso.apply(Xp, yp)
                else:
                    skipped = True  # positive side concentrated on a subspace
            else:
                Xt, yt = Xp, yp
            if not skipped:
                wp = w if A is None else np.linalg.solve(A, w)
                sgn = np.sign(Xt @ wp - yt)
                grad = (Xt * sgn[:, None]).mean(axis=0)
                w = w - alpha * (grad if A is None else A @ grad)
        loss, _ = relu_l1_loss(samples, w)
        dist = math.nan if w_star is None else float(np.linalg.norm(w - w_star))
        trajectory.append(GdStep(it, w.copy(), dist, loss, skipped))
    return trajectory


def trajectory_csv_rows(trajectory):
    """Rows (iter, loss, distance) ready for csv.writer."""
    return [(step.iteration, step.loss, step.distance) for step in trajectory]
