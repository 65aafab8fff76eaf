"""Compiled episode kernel for the pendulum preset.

Mirrors actor_critic.run_episode step for step: one normal draw per step,
angle wrap after the RK4 update, cost accumulated for every executed step,
update order trace -> weights -> zeta. The RNG is created outside and
passed in, so the draw stream matches the pure-python path exactly; the
consistency test in the suite holds the two paths together.
"""

import numpy as np
from numba import njit


def pack_args(params, spec, grid):
    """Flatten plant, episode, and basis descriptions into kernel scalars."""
    ml2 = params.M * params.L * params.L
    Q = np.asarray(spec.weights.Q, dtype=float)
    R = np.asarray(spec.weights.R, dtype=float)
    c1 = np.ascontiguousarray(grid.centers[:, 0])
    c2 = np.ascontiguousarray(grid.centers[:, 1])
    return (
        params.g / params.L,
        params.eta / ml2,
        1.0 / ml2,
        float(spec.Ts),
        int(spec.max_steps),
        float(spec.x0[0]),
        float(spec.x0[1]),
        float(spec.gamma),
        float(spec.lambda_theta),
        float(spec.lambda_W),
        float(spec.alpha),
        float(spec.beta),
        float(Q[0, 0]),
        float(Q[0, 1]),
        float(Q[1, 1]),
        float(R[0, 0]),
        float(spec.penalty_angle),
        float(spec.penalty_reward),
        c1,
        c2,
        float(grid.widths[0]),
        float(grid.widths[1]),
    )


@njit(cache=True)
def _feats(p, xi, c1, c2, w1, w2, out):
    for j in range(out.size):
        a = (p - c1[j]) / w1
        b = (xi - c2[j]) / w2
        out[j] = np.exp(-0.5 * (a * a + b * b))


@njit(cache=True)
def _pend_rk4(p, xi, u, dt, gl, eml2, iml2):
    k1p = xi
    k1x = gl * np.sin(p) - eml2 * xi + iml2 * u
    p2 = p + 0.5 * dt * k1p
    x2 = xi + 0.5 * dt * k1x
    k2p = x2
    k2x = gl * np.sin(p2) - eml2 * x2 + iml2 * u
    p3 = p + 0.5 * dt * k2p
    x3 = xi + 0.5 * dt * k2x
    k3p = x3
    k3x = gl * np.sin(p3) - eml2 * x3 + iml2 * u
    p4 = p + dt * k3p
    x4 = xi + dt * k3x
    k4p = x4
    k4x = gl * np.sin(p4) - eml2 * x4 + iml2 * u
    pn = p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    xn = xi + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    # same wrap rule as plants.wrap_angle
    pn = np.arctan2(np.sin(pn), np.cos(pn))
    return pn, xn


@njit(cache=True)
def episode(theta, W, sig2, use_k, k0, k1, rng, gl, eml2, iml2, Ts, max_steps,
            x00, x01, gamma, lam_t, lam_w, alpha, beta, q00, q01, q11, r00,
            pen_angle, pen_reward, c1, c2, w1, w2):
    """One learning episode; mutates theta and W in place.

    Returns (cost_J, steps_taken, penalized).
    """
    N = theta.size
    p = x00
    xi = x01
    z = np.zeros(N)
    Z = np.zeros(N)
    zeta = 1.0
    phi = np.empty(N)
    phin = np.empty(N)
    _feats(p, xi, c1, c2, w1, w2, phi)
    sig = np.sqrt(sig2)
    J = 0.0
    steps = 0
    pen = False
    glt = gamma * lam_t
    glw = gamma * lam_w
    for _ in range(max_steps):
        mu = 0.0
        for j in range(N):
            mu += W[j] * phi[j]
        u_rl = mu + sig * rng.standard_normal()
        u = (k0 * p + k1 * xi + u_rl) if use_k else u_rl
        pn, xn = _pend_rk4(p, xi, u, Ts, gl, eml2, iml2)
        quad = q00 * pn * pn + 2.0 * q01 * pn * xn + q11 * xn * xn + r00 * u * u
        J += quad
        steps += 1
        pen = abs(pn) >= pen_angle
        _feats(pn, xn, c1, c2, w1, w2, phin)
        v = 0.0
        vn = 0.0
        for j in range(N):
            v += theta[j] * phi[j]
            vn += theta[j] * phin[j]
        r = pen_reward if pen else -quad
        bootstrap = 0.0 if pen else vn
        delta = r + gamma * bootstrap - v
        gexc = u_rl - mu  # score times the episode covariance
        ad = alpha * delta
        bd = beta * delta
        for j in range(N):
            z[j] = glt * z[j] + zeta * phi[j]
            Z[j] = glw * Z[j] + zeta * gexc * phi[j]
            theta[j] += ad * z[j]
            W[j] += bd * Z[j]
        zeta *= gamma
        if pen:
            break
        p = pn
        xi = xn
        tmp = phi
        phi = phin
        phin = tmp
    return J, steps, pen
