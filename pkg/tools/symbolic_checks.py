"""Dev-time symbolic cross-checks (not shipped with the package).

Pins down, with exact rational arithmetic on random polynomial data:

1. the correspondence between the reduced stationary residuals
   (tt / ij / ti form) and the blocks of  E := Ric(g_minus) + kappa*g_minus
   in the horizontal frame  X = d_t,  Y_i = d_i - theta_i X,
2. the sign conventions of the twist composition used on the right-hand
   sides of the reduced system.

Run:  python3 tools/symbolic_checks.py
"""

import sympy as sp


def christoffel(g, coords):
    n = len(coords)
    ginv = g.inv()
    gam = [[[0] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gam[k][i][j] = sp.Rational(1, 2) * sum(
                    ginv[k, l]
                    * (
                        sp.diff(g[l, j], coords[i])
                        + sp.diff(g[l, i], coords[j])
                        - sp.diff(g[i, j], coords[l])
                    )
                    for l in range(n)
                )
    return gam


def ricci(g, coords):
    n = len(coords)
    gam = christoffel(g, coords)
    ric = sp.zeros(n, n)
    for k in range(n):
        for b in range(n):
            val = 0
            for a in range(n):
                val += sp.diff(gam[a][b][k], coords[a]) - sp.diff(gam[a][a][k], coords[b])
                for m in range(n):
                    val += gam[a][a][m] * gam[m][b][k] - gam[a][b][m] * gam[m][a][k]
            ric[k, b] = val
    return ric, gam


def main():
    x, y, t = sp.symbols("x y t")
    kappa = sp.Rational(3, 7)

    # random low-order polynomial data: V > 0, theta, g positive definite
    import random

    random.seed(12)

    def poly():
        return sum(
            sp.Rational(random.randint(-3, 3), random.randint(1, 4)) * mon
            for mon in (1, x, y, x * y, x**2, y**2)
        )

    V = 2 + sp.Rational(1, 5) * poly()
    th = [sp.Rational(1, 7) * poly(), sp.Rational(1, 9) * poly()]
    gp = sp.Matrix(
        [
            [3 + sp.Rational(1, 5) * poly(), sp.Rational(1, 8) * poly()],
            [0, 3 + sp.Rational(1, 6) * poly()],
        ]
    )
    gp[1, 0] = gp[0, 1]

    coords_m = [x, y]
    coords_st = [t, x, y]

    # space-time metric g_minus = -V^2 (dt + theta)^2 + g_plus
    gm = sp.zeros(3, 3)
    gm[0, 0] = -(V**2)
    for i in range(2):
        gm[0, i + 1] = gm[i + 1, 0] = -(V**2) * th[i]
        for j in range(2):
            gm[i + 1, j + 1] = gp[i, j] - V**2 * th[i] * th[j]

    ric_m, _ = ricci(gm, coords_st)
    E = ric_m + kappa * gm

    # reduced system pieces on (M, g_plus)
    ric_p, gam_p = ricci(gp, coords_m)
    gpinv = gp.inv()

    dV = [sp.diff(V, c) for c in coords_m]
    hessV = sp.zeros(2, 2)
    for i in range(2):
        for j in range(2):
            hessV[i, j] = sp.diff(V, coords_m[i], coords_m[j]) - sum(
                gam_p[k][i][j] * dV[k] for k in range(2)
            )
    lapV = sum(gpinv[i, j] * hessV[i, j] for i in range(2) for j in range(2))

    lam = sp.zeros(2, 2)
    for i in range(2):
        for j in range(2):
            lam[i, j] = -(V**2) * (sp.diff(th[j], coords_m[i]) - sp.diff(th[i], coords_m[j]))

    def compose(a, b):
        out = sp.zeros(2, 2)
        for i in range(2):
            for j in range(2):
                out[i, j] = sum(
                    gpinv[k, l] * a[i, k] * b[j, l] for k in range(2) for l in range(2)
                )
        return out

    lam2 = compose(lam, lam)
    norm_lam = sum(gpinv[i, k] * gpinv[j, l] * lam[i, j] * lam[k, l]
                   for i in range(2) for j in range(2) for k in range(2) for l in range(2))

    res_tt = V * (-lapV + kappa * V) - sp.Rational(1, 4) * norm_lam

    res_ij = sp.zeros(2, 2)
    for i in range(2):
        for j in range(2):
            res_ij[i, j] = (
                ric_p[i, j] + kappa * gp[i, j] - hessV[i, j] / V
                - sp.Rational(1, 2) * lam2[i, j] / V**2
            )

    # res_ti = div(V lam)_j = -g^{ik} nabla_k (V lam)_{ij}
    T = V * lam
    res_ti = [0, 0]
    for j in range(2):
        val = 0
        for k in range(2):
            for i in range(2):
                cov = sp.diff(T[i, j], coords_m[k]) - sum(
                    gam_p[m][k][i] * T[m, j] + gam_p[m][k][j] * T[i, m] for m in range(2)
                )
                val += -gpinv[k, i] * cov
        res_ti[j] = val

    # horizontal blocks
    E_XX = E[0, 0]
    E_XY = [E[0, i + 1] - th[i] * E[0, 0] for i in range(2)]
    E_YY = sp.zeros(2, 2)
    for i in range(2):
        for j in range(2):
            E_YY[i, j] = (
                E[i + 1, j + 1]
                - th[i] * E[0, j + 1]
                - th[j] * E[0, i + 1]
                + th[i] * th[j] * E[0, 0]
            )

    pt = {x: sp.Rational(3, 11), y: sp.Rational(-2, 9), t: 0}

    def ev(e):
        return sp.nsimplify(e.subs(pt), rational=True)

    print("check res_tt == -E(X,X):", sp.simplify(ev(res_tt + E_XX)) == 0)

    # res_ij vs E(Y,Y): try res_ij = E_YY
    ok = all(sp.simplify(ev(res_ij[i, j] - E_YY[i, j])) == 0 for i in range(2) for j in range(2))
    print("check res_ij == E(Y,Y):", ok)

    # res_ti vs E(X,Y): fit res_ti = c * V^a * E_XY componentwise
    r0 = ev(res_ti[0])
    e0 = ev(E_XY[0])
    ratio = sp.simplify(r0 / e0)
    Vp = ev(V)
    print("res_ti / E_XY at point:", sp.nsimplify(ratio, rational=True))
    print("  V at point:", Vp, "   ratio/(2V):", sp.simplify(ratio / (2 * Vp)),
          "   ratio/(-2V):", sp.simplify(ratio / (-2 * Vp)),
          "   ratio/V:", sp.simplify(ratio / Vp))
    r1 = ev(res_ti[1])
    e1 = ev(E_XY[1])
    print("second component consistent:", sp.simplify(r1 / e1 - ratio) == 0)


if __name__ == "__main__":
    main()
