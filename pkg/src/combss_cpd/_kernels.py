"""Hot numeric kernels shared by :mod:`linalg` and :mod:`combss`.

Everything here takes and returns float64 numpy arrays and reports failure
through return flags rather than exceptions so the code compiles under numba
nopython mode.  Public wrappers live in the sibling modules.
"""
import numpy as np

from ._accel import njit

# Relaxation variables are kept inside [T_EPS, 1 - T_EPS] by every solver.
T_EPS = 1e-8
PIVOT_TOL = 1e-14
# Above this value of t the Woodbury back-substitution switches branches.
_BRANCH_T = 0.5


@njit
def prefix_sum(v):
    return np.cumsum(v)


@njit
def suffix_sum(v):
    n = v.shape[0]
    out = np.empty(n)
    acc = 0.0
    for i in range(n - 1, -1, -1):
        acc += v[i]
        out[i] = acc
    return out


@njit
def gram_apply(v):
    return suffix_sum(prefix_sum(v))


@njit
def clamp_t(t):
    return np.minimum(np.maximum(t, T_EPS), 1.0 - T_EPS)


@njit
def thomas(lower, diag, upper, rhs, out):
    """Solve a tridiagonal system without pivoting; False on a tiny pivot."""
    n = diag.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    piv = diag[0]
    if abs(piv) < PIVOT_TOL:
        return False
    if n > 1:
        cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if abs(piv) < PIVOT_TOL:
            return False
        if i < n - 1:
            cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return True


@njit
def mt_solve(t, b, out):
    """Solve ``(T G T + n (I - T^2)) u = b`` for clamped ``t`` in O(n).

    Woodbury with ``D = n (I - T^2)`` reduces the dense system to the
    tridiagonal ``Mtil = G^{-1} + T D^{-1} T``.  With ``q = Mtil^{-1} T D^{-1} b``
    the solution satisfies both ``u = D^{-1} (b - T q)`` and ``T u = G^{-1} q``;
    the first form is used where ``t`` is small and the second where ``D`` is
    tiny, so neither branch subtracts two huge terms.
    """
    n = t.shape[0]
    d = n * (1.0 - t * t)
    diag = t * t / d + 2.0
    diag[0] -= 1.0
    off = -np.ones(max(n - 1, 0))
    q = np.empty(n)
    if not thomas(off, diag, off, t * b / d, q):
        return False
    for i in range(n):
        if t[i] >= _BRANCH_T:
            aq = (1.0 if i == 0 else 2.0) * q[i]
            if i > 0:
                aq -= q[i - 1]
            if i < n - 1:
                aq -= q[i + 1]
            out[i] = aq / t[i]
        else:
            out[i] = (b[i] - t[i] * q[i]) / d[i]
    return True


@njit
def w_to_t(w):
    return 1.0 - np.exp(-w * w)


@njit
def objective_t(t, y, xty, lam):
    """Objective at clamped ``t``; returns (value, ok)."""
    n = y.shape[0]
    beta = np.empty(n)
    if not mt_solve(t, t * xty, beta):
        return np.inf, False
    resid = y - prefix_sum(t * beta)
    return np.dot(resid, resid) / n + lam * np.sum(t), True


@njit
def value_and_grad_w(w, y, xty, lam, grad):
    """Objective value and its gradient with respect to ``w``.

    Two structured solves: the coefficient vector ``beta`` and the adjoint
    ``v = M^{-1} T X^T e`` for the residual ``e``.  The clamp on ``t`` is
    treated as the identity when differentiating.
    """
    n = y.shape[0]
    ew = np.exp(-w * w)
    t = clamp_t(1.0 - ew)
    beta = np.empty(n)
    if not mt_solve(t, t * xty, beta):
        return np.inf, False
    tb = t * beta
    resid = y - prefix_sum(tb)
    xte = suffix_sum(resid)
    adj = np.empty(n)
    if not mt_solve(t, t * xte, adj):
        return np.inf, False
    g_tb = gram_apply(tb)
    g_tv = gram_apply(t * adj)
    dfdt = (-2.0 / n) * (
        xte * beta + adj * xty - adj * g_tb - beta * g_tv + 2.0 * n * t * adj * beta
    ) + lam
    dtdw = 2.0 * w * ew
    for i in range(n):
        grad[i] = dfdt[i] * dtdw[i]
    return np.dot(resid, resid) / n + lam * np.sum(t), True


@njit
def adam_run(y, lam, w, lr, max_iter, tol, beta1, beta2, eps):
    """Adam descent on ``w`` in place.

    Returns (iterations_used, converged, ok).  Convergence is the sup-norm
    change of ``t`` between consecutive iterates.
    """
    n = y.shape[0]
    xty = suffix_sum(y)
    m = np.zeros(n)
    v = np.zeros(n)
    g = np.empty(n)
    t_prev = w_to_t(w)
    b1k = 1.0
    b2k = 1.0
    for k in range(1, max_iter + 1):
        _, ok = value_and_grad_w(w, y, xty, lam, g)
        if not ok:
            return k, False, False
        b1k *= beta1
        b2k *= beta2
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        mhat = m / (1.0 - b1k)
        vhat = v / (1.0 - b2k)
        w[:] = w - lr * mhat / (np.sqrt(vhat) + eps)
        t_new = w_to_t(w)
        if np.max(np.abs(t_new - t_prev)) <= tol:
            return k, True, True
        t_prev = t_new
    return max_iter, False, True
