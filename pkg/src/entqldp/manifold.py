"""Riemannian optimizer for the privacy energy over weights and local bases.

The energy of the state built from Schmidt weights lambda and local basis
unitaries U_A, U_B (state convention: |j_A> is column j of U_A^dag) is

    F(lambda, U_A, U_B) = sum_jk sqrt(lambda_j lambda_k) KA~[j,k] KB~[j,k]
                        = Tr(Lam^1/2 KA~ Lam^1/2 KB~^T),

where KA~ = U_A K_a U_A^dag and KB~ = U_B K_b U_B^dag are the rotated
observables. Note the transpose on the B factor: it is forced by the
direct contraction <psi|K_a (x) K_b|psi> and matters for complex
observables (for real symmetric ones it drops out).

The optimizer works in the square-root parametrization x with
lambda = x * x and ||x|| = 1, so the simplex constraint is the unit sphere
and the energy is the smooth quadratic x^T G x with
G = Re(KA~ o KB~) (Hadamard product; PSD by the Schur product theorem).
Sign flips of x are absorbed by basis phases, so signed x is legitimate.
The entropy constraint H(x*x) >= s is enforced by projecting the search
direction onto the constraint tangent when active and by convex-mixing the
weights back toward uniform after a violating step (mixing toward uniform
only raises entropy, so the mixing weight bisects).

Steps are joint Armijo-backtracked moves of (x, U_A, U_B) with QR
retraction on the unitaries, interleaved with exact block updates of each
unitary alone (the single-unitary subproblem is a trace alignment solved
exactly by eigenbasis (anti-)sorting, per the von Neumann trace
inequality).
"""

from dataclasses import dataclass

import numpy as np

from .states import shannon_entropy, random_unitary, _mix_to_entropy

LAMBDA_FLOOR = 1e-14
UNITARY_TOL = 1e-10
ARMIJO_SLOPE = 1e-4
ARMIJO_CONTRACTION = 0.5
ALIGN_EVERY = 10


@dataclass(frozen=True)
class ManifoldPoint:
    """Feasible iterate: Schmidt weights and the two local basis unitaries."""

    lam: np.ndarray
    unitary_a: np.ndarray
    unitary_b: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        ua = np.asarray(self.unitary_a, dtype=complex)
        ub = np.asarray(self.unitary_b, dtype=complex)
        n = len(lam)
        if abs(lam.sum() - 1.0) > 1e-10 or np.any(lam < -1e-12):
            raise ValueError("weights must lie on the probability simplex")
        for name, u in (("unitary_a", ua), ("unitary_b", ub)):
            if u.shape != (n, n):
                raise ValueError(f"{name} must be {n} x {n}")
            if np.max(np.abs(u.conj().T @ u - np.eye(n))) > UNITARY_TOL:
                raise ValueError(f"{name} is not unitary")
        object.__setattr__(self, "lam", np.clip(lam, 0.0, None))
        object.__setattr__(self, "unitary_a", ua)
        object.__setattr__(self, "unitary_b", ub)


@dataclass(frozen=True)
class KktResidual:
    """Residuals of the first-order certificate at a feasible point.

    stationarity_lambda is the worst gap in the weight-stationarity
    equation over coordinates with lambda_j > 1e-12 after fitting the
    multipliers (nu for the simplex, xi >= 0 for the entropy floor,
    eta_j >= 0 for the nonnegativity bounds) by least squares;
    dual_feas collects clamped negative parts of xi and eta;
    compl_slack collects |xi (H - s)| and |eta_j lambda_j|.
    """

    grad_ua_norm: float
    grad_ub_norm: float
    stationarity_lambda: float
    primal_feas: float
    dual_feas: float
    compl_slack: float
    nu: float
    xi: float
    eta: np.ndarray


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start settings; serializes as the JSON fragment
    {"restarts": 8, "max_iters": 2000, "tol": 1e-8, "seed": 42}."""

    restarts: int = 8
    max_iters: int = 2000
    tol: float = 1e-8
    seed: int = 42


@dataclass(frozen=True)
class OptimizeResult:
    value: float
    point: ManifoldPoint
    residual: KktResidual
    converged: bool
    iterations: int


def _rotate(k, u):
    return u @ k @ u.conj().T


def _check_observables(k_a, k_b):
    k_a = np.asarray(k_a, dtype=complex)
    k_b = np.asarray(k_b, dtype=complex)
    if k_a.shape != k_b.shape or k_a.ndim != 2 or k_a.shape[0] != k_a.shape[1]:
        raise ValueError(
            f"observables must be square and same-dimensional, got "
            f"{k_a.shape} and {k_b.shape}")
    return k_a, k_b


def objective(k_a, k_b, point):
    """Privacy energy of the state encoded by `point`.

    Equals <psi|K_a (x) K_b|psi> for psi = sum_j sqrt(lambda_j)
    (U_A^dag e_j) (x) (U_B^dag e_j).
    """
    k_a, k_b = _check_observables(k_a, k_b)
    if k_a.shape[0] != len(point.lam):
        raise ValueError("observable dimension does not match weight length")
    ka_t = _rotate(k_a, point.unitary_a)
    kb_t = _rotate(k_b, point.unitary_b)
    x = np.sqrt(point.lam)
    g = (ka_t * kb_t).real
    return float(x @ g @ x)


def euclidean_gradients(k_a, k_b, point):
    """Euclidean gradients of the energy w.r.t. (U_A, U_B, lambda).

    grad_UA = 2 Lam^1/2 KB~^T Lam^1/2 U_A K_a,
    grad_UB = 2 Lam^1/2 KA~^T Lam^1/2 U_B K_b,
    grad_lambda_j = (1/(2 sqrt(lambda_j))) (KA~ Lam^1/2 KB~^T
                                            + KB~^T Lam^1/2 KA~)_jj
                  = G_jj + sum_{k != j} G_jk sqrt(lambda_k / lambda_j),
    with G = Re(KA~ o KB~).

    At lambda_j = 0 the diagonal term G_jj is the exact one-sided
    derivative whenever the off-diagonal sum vanishes (in particular at
    basis-aligned points); the off-diagonal part, which genuinely diverges
    as lambda_j -> 0 otherwise, has sqrt(lambda_j) floored at 1e-7. Only
    this reporting is floored; the optimization variables never are.
    """
    k_a, k_b = _check_observables(k_a, k_b)
    ua, ub = point.unitary_a, point.unitary_b
    ka_t = _rotate(k_a, ua)
    kb_t = _rotate(k_b, ub)
    root = np.diag(np.sqrt(point.lam))
    grad_ua = 2.0 * root @ kb_t.T @ root @ ua @ k_a
    grad_ub = 2.0 * root @ ka_t.T @ root @ ub @ k_b
    x = np.sqrt(point.lam)
    g = (ka_t * kb_t).real
    diag = np.diag(g)
    off = g @ x - diag * x
    grad_lam = diag + off / np.maximum(x, np.sqrt(LAMBDA_FLOOR))
    return grad_ua, grad_ub, grad_lam


def riemannian_gradient(u, euclid):
    """Tangent-space projection U skew(U^dag grad), skew(X) = (X - X^dag)/2."""
    pull = u.conj().T @ np.asarray(euclid, dtype=complex)
    return u @ (pull - pull.conj().T) / 2.0


def qr_retract(u, step):
    """Retract U + step back to the unitary group by sign-fixed thin QR."""
    q, r = np.linalg.qr(u + step)
    d = np.diag(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d / np.abs(d))


def commutation_residual(k_a, k_b, point):
    """Stationarity in commutation form: the max-norm of
    [Lam^1/2 KB~^T Lam^1/2, KA~], which vanishes at basis-stationary points."""
    k_a, k_b = _check_observables(k_a, k_b)
    ka_t = _rotate(k_a, point.unitary_a)
    kb_t = _rotate(k_b, point.unitary_b)
    root = np.diag(np.sqrt(point.lam))
    w = root @ kb_t.T @ root
    return float(np.max(np.abs(w @ ka_t - ka_t @ w)))


def _entropy_gradient_x(x):
    """Gradient of H(x*x) in x; zero coordinates contribute zero."""
    lam = x * x
    safe = np.maximum(lam, LAMBDA_FLOOR)
    return -2.0 * x * (1.0 + np.log(safe))


def _project_sphere(x, v):
    return v - (x @ v) * x


def _repair_entropy(x, s):
    """Restore H(x*x) >= s by convex-mixing the weights toward uniform,
    keeping the signs of x."""
    lam = x * x
    lam = lam / lam.sum()
    if shannon_entropy(lam) >= s:
        return x
    mixed = _mix_to_entropy(lam, s)
    signs = np.where(x < 0.0, -1.0, 1.0)
    out = signs * np.sqrt(mixed)
    return out / np.linalg.norm(out)


def _align_unitary(k_local, w, direction):
    """Exact solution of max/min over U of Tr(U K U^dag W).

    The extremum pairs the eigenbases: descending-with-descending for the
    max, descending-with-ascending for the min (von Neumann trace
    inequality). Returns the optimizing U.
    """
    eig_k, vec_k = np.linalg.eigh(k_local)
    eig_w, vec_w = np.linalg.eigh(w)
    vk = vec_k[:, ::-1]
    vw = vec_w[:, ::-1] if direction == "max" else vec_w
    return vw @ vk.conj().T


def kkt_residuals(k_a, k_b, point, s, direction="max"):
    """First-order certificate residuals at a feasible point.

    Fits the multipliers of the stationarity equation
    sigma grad_lambda F_j = nu + xi (1 + log lambda_j) - eta_j
    (sigma = +1 for max, -1 for min) by least squares over coordinates with
    lambda_j > 1e-12, trying both the active-entropy fit and the xi = 0 fit
    when the entropy constraint sits exactly at its boundary, and reports
    the residual norms of every condition group. At s = log N the feasible
    weight set is the single uniform point, so weight stationarity is
    vacuous and reported as zero.
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    sigma = 1.0 if direction == "max" else -1.0
    n = len(point.lam)
    grad_ua, grad_ub, grad_lam = euclidean_gradients(k_a, k_b, point)
    r_ua = float(np.linalg.norm(riemannian_gradient(point.unitary_a, grad_ua)))
    r_ub = float(np.linalg.norm(riemannian_gradient(point.unitary_b, grad_ub)))

    lam = point.lam
    entropy = shannon_entropy(lam)
    primal = max(
        abs(float(lam.sum()) - 1.0),
        max(0.0, s - entropy),
        max(0.0, -float(lam.min())),
        float(np.max(np.abs(point.unitary_a.conj().T @ point.unitary_a - np.eye(n)))),
        float(np.max(np.abs(point.unitary_b.conj().T @ point.unitary_b - np.eye(n)))),
    )

    phi = sigma * grad_lam
    interior = lam > 1e-12
    log_n = np.log(n)

    if s >= log_n - 1e-9:
        # The only feasible weight vector is uniform; there is no free
        # weight direction, so stationarity and the multipliers are moot.
        return KktResidual(grad_ua_norm=r_ua, grad_ub_norm=r_ub,
                           stationarity_lambda=0.0, primal_feas=primal,
                           dual_feas=0.0, compl_slack=0.0,
                           nu=float(np.mean(phi)), xi=0.0, eta=np.zeros(n))

    entropy_active = entropy <= s + 1e-7

    def fit(use_xi):
        ones = np.ones(int(interior.sum()))
        log_term = 1.0 + np.log(lam[interior])
        if use_xi:
            design = np.stack([ones, log_term], axis=1)
        else:
            design = ones[:, None]
        coef, *_ = np.linalg.lstsq(design, phi[interior], rcond=None)
        nu = float(coef[0])
        xi = float(coef[1]) if use_xi else 0.0
        stat = float(np.max(np.abs(design @ coef - phi[interior]))) \
            if len(coef) else 0.0
        eta = np.zeros(n)
        boundary = ~interior
        if boundary.any():
            log_b = 1.0 + np.log(np.maximum(lam[boundary], LAMBDA_FLOOR))
            eta[boundary] = nu + xi * log_b - phi[boundary]
        dual = max(0.0, -xi) + float(np.sum(np.maximum(0.0, -eta)))
        slack = abs(xi * (entropy - s)) + float(np.sum(np.abs(eta * lam)))
        return stat, dual, slack, nu, xi, eta

    candidates = [fit(use_xi=entropy_active)]
    if entropy_active and (~interior).any():
        # At a degenerate boundary-threshold point the xi = 0 certificate
        # can be the clean one; keep whichever violates less.
        candidates.append(fit(use_xi=False))
    stat, dual, slack, nu, xi, eta = min(
        candidates, key=lambda c: c[0] + c[1] + c[2])

    return KktResidual(grad_ua_norm=r_ua, grad_ub_norm=r_ub,
                       stationarity_lambda=stat, primal_feas=primal,
                       dual_feas=dual, compl_slack=slack,
                       nu=nu, xi=xi, eta=eta)


def _feasible_x(lam, s):
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, None)
    lam = lam / lam.sum()
    lam = _mix_to_entropy(lam, s)
    x = np.sqrt(lam)
    return x / np.linalg.norm(x)


def _projected_x_gradient(x, g_x, s, pinned):
    """Sphere-tangent gradient, with the entropy wall projected out when it
    is active and the raw direction points into it."""
    if pinned:
        return np.zeros_like(x)
    g = _project_sphere(x, g_x)
    entropy = shannon_entropy(x * x)
    if entropy <= s + 1e-7:
        h = _project_sphere(x, _entropy_gradient_x(x))
        hn = h @ h
        if hn > 1e-18 and g @ h < 0.0:
            g = g - (g @ h) / hn * h
    return g


def _run_single(k_a, k_b, s, sigma, x, ua, ub, config, pinned):
    """One local ascent/descent run; returns the final iterate and history."""
    n = len(x)

    def energy(xv, uav, ubv):
        g = (_rotate(k_a, uav) * _rotate(k_b, ubv)).real
        return float(xv @ g @ xv)

    f = energy(x, ua, ub)
    iterations = 0
    converged = False
    for it in range(config.max_iters):
        iterations = it + 1
        if it % ALIGN_EVERY == 0:
            # Exact block updates of each unitary (trace alignment).
            sqrt_l = np.diag(np.abs(x))
            kb_t = _rotate(k_b, ub)
            wa = sqrt_l @ kb_t.T @ sqrt_l
            ua_new = _align_unitary(k_a, wa, "max" if sigma > 0 else "min")
            if sigma * energy(x, ua_new, ub) >= sigma * f:
                ua = ua_new
                f = energy(x, ua, ub)
            ka_t = _rotate(k_a, ua)
            wb = sqrt_l @ ka_t.T @ sqrt_l
            ub_new = _align_unitary(k_b, wb, "max" if sigma > 0 else "min")
            if sigma * energy(x, ua, ub_new) >= sigma * f:
                ub = ub_new
                f = energy(x, ua, ub)

        ka_t = _rotate(k_a, ua)
        kb_t = _rotate(k_b, ub)
        g_mat = (ka_t * kb_t).real
        gx = _projected_x_gradient(x, sigma * 2.0 * g_mat @ x, s, pinned)

        sqrt_l = np.diag(np.abs(x))
        grad_ua = 2.0 * sqrt_l @ kb_t.T @ sqrt_l @ ua @ k_a
        grad_ub = 2.0 * sqrt_l @ ka_t.T @ sqrt_l @ ub @ k_b
        rga = riemannian_gradient(ua, sigma * grad_ua)
        rgb = riemannian_gradient(ub, sigma * grad_ub)

        sq_norm = float(gx @ gx + np.linalg.norm(rga) ** 2
                        + np.linalg.norm(rgb) ** 2)
        if np.sqrt(sq_norm) <= config.tol:
            converged = True
            break

        step = 1.0
        accepted = False
        while step > 1e-14:
            x_new = x + step * gx
            x_new /= np.linalg.norm(x_new)
            x_new = _repair_entropy(x_new, s)
            ua_new = qr_retract(ua, step * rga)
            ub_new = qr_retract(ub, step * rgb)
            f_new = energy(x_new, ua_new, ub_new)
            if sigma * f_new >= sigma * f + ARMIJO_SLOPE * step * sq_norm:
                x, ua, ub, f = x_new, ua_new, ub_new, f_new
                accepted = True
                break
            step *= ARMIJO_CONTRACTION
        if not accepted:
            # No Armijo step exists at machine scale; treat the point as
            # numerically stationary for this start.
            converged = np.sqrt(sq_norm) <= max(config.tol * 100.0, 1e-7)
            break
    return f, x, ua, ub, converged, iterations


def optimize(k_a, k_b, s, direction, config=None, seed=None):
    """Multi-start constrained search for the extremal privacy energy.

    Parameters
    ----------
    k_a, k_b : ndarray
        Hermitian PSD local observables (equal dimension N).
    s : float
        Entanglement-entropy floor in nats, within [0, log N].
    direction : {"max", "min"}
    config : OptimizerConfig, optional
    seed : int, optional
        Overrides config.seed when given.

    Returns
    -------
    OptimizeResult
        Best value over the restarts with its iterate and first-order
        residuals. Non-convergence is flagged on the result, never raised.

    Starts are the identity basis pair with a small tangent perturbation
    plus Haar-random bases with random feasible weights; no closed-form
    solution is used to seed the search.
    """
    k_a, k_b = _check_observables(k_a, k_b)
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    config = config or OptimizerConfig()
    n = k_a.shape[0]
    log_n = np.log(n)
    if s < -1e-12 or s > log_n + 1e-12:
        raise ValueError(f"entropy level {s} outside [0, log {n}]")
    s = min(max(s, 0.0), log_n)
    pinned = s >= log_n - 1e-9
    sigma = 1.0 if direction == "max" else -1.0
    rng = np.random.default_rng(config.seed if seed is None else seed)

    starts = []
    eye = np.eye(n, dtype=complex)
    noise_a = 1e-3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    noise_b = 1e-3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    starts.append((_feasible_x(np.full(n, 1.0 / n), s),
                   qr_retract(eye, noise_a - noise_a.conj().T),
                   qr_retract(eye, noise_b - noise_b.conj().T)))
    for _ in range(max(config.restarts - 1, 0)):
        lam0 = rng.dirichlet(np.ones(n))
        starts.append((_feasible_x(lam0, s),
                       random_unitary(n, rng),
                       random_unitary(n, rng)))

    best = None
    for x0, ua0, ub0 in starts:
        f, x, ua, ub, conv, iters = _run_single(
            k_a, k_b, s, sigma, x0.copy(), ua0, ub0, config, pinned)
        if best is None or sigma * f > sigma * best[0]:
            best = (f, x, ua, ub, conv, iters)

    f, x, ua, ub, conv, iters = best
    lam = x * x
    lam = lam / lam.sum()
    order = np.argsort(lam)[::-1]
    # Present the point with descending weights; the permutation is
    # absorbed into the bases, and sign flips of x into basis phases.
    perm = np.zeros((n, n))
    perm[np.arange(n), order] = 1.0
    signs = np.where(x < 0.0, -1.0, 1.0)
    ua_final = perm @ np.diag(signs) @ ua
    ub_final = perm @ ub
    point = ManifoldPoint(lam=lam[order], unitary_a=ua_final, unitary_b=ub_final)
    residual = kkt_residuals(k_a, k_b, point, s, direction)
    return OptimizeResult(value=objective(k_a, k_b, point), point=point,
                          residual=residual, converged=conv, iterations=iters)
