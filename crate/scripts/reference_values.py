"""Reference values frozen into the Rust test suites.

Computed with mpmath at 40 significant digits; independent of the Rust
implementation paths (series/trapezoid Bessel, adaptive quadrature).
Run: python3 scripts/reference_values.py
"""
from mpmath import mp, mpf, besselk, quad, sqrt, pi, exp, log, sin, cos, cosh, sinh, inf, mpc, im

mp.dps = 40


def k2(x):
    return besselk(2, x)


def k_imag(nu):
    return besselk(mpc(0, nu), 1).real


def symbol(x, gamma):
    if x == 0:
        return sqrt(3) / 2 - 2 * pi / 3 + pi / 2 * gamma
    return sqrt(3) / 2 + (gamma * sinh(pi * x / 2) - 4 * sinh(pi * x / 6)) / (x * cosh(pi * x / 2))


def mellin_sq(beta, x):
    # |f^#_beta(x)|^2 with f^#_beta(x) = sqrt(2/pi) / beta * K_{i x / beta}(1)
    return (sqrt(2 / pi) / beta * k_imag(x / beta)) ** 2


def diagonalized(beta, weight, extent):
    return 48 * pi**2 * 2 * quad(lambda x: mellin_sq(beta, x) * weight(x), [0, 1, 5, extent / 2, extent])


def w_diag(x):
    return sqrt(3) / 2


def w_off(x):
    if x == 0:
        return -2 * pi / 3
    return -4 * sinh(pi * x / 6) / (x * cosh(pi * x / 2))


def w_reg(x):
    if x == 0:
        return pi / 2
    return sinh(pi * x / 2) / cosh(pi * x / 2) / x


def main():
    print("# bessel_k2")
    for x in ["1e-6", "1e-3", "0.1", "0.5", "1", "1.9", "2", "2.1", "5", "10", "50", "100", "300", "700"]:
        print(f"({x}, {mp.nstr(k2(mpf(x)), 20)}),")
    print("# K_{i nu}(1)")
    for nu in ["0", "0.5", "1", "2.5", "5", "10", "20"]:
        print(f"({nu}, {mp.nstr(k_imag(mpf(nu)), 20)}),")
    print("K0(1)", mp.nstr(besselk(0, 1), 20))
    print("K_{50i}(1) magnitude", mp.nstr(k_imag(50), 5))
    print("S(0,0)", mp.nstr(symbol(0, 0), 20))
    print("gamma_c", mp.nstr(mpf(4) / 3 - sqrt(3) / pi, 20))
    print("gamma'_c", mp.nstr(2 - sqrt(3) / pi, 20))

    # p q e^{-p^2-q^2} ln((p+q)^2/(p-q)^2) over (0,inf)^2, polar coordinates
    ang = quad(lambda t: cos(t) * sin(t) * log((cos(t) + sin(t)) ** 2 / (cos(t) - sin(t)) ** 2), [0, pi / 4, pi / 2])
    print("logdiag gaussian kernel", mp.nstr(ang / 2, 20))

    # fbeta(1) position profile at y = 1: sqrt(2/pi) * Im[2 K0(sqrt(1 - 2 i y))] / y
    y = mpf(1)
    closed = sqrt(2 / pi) * im(2 * besselk(0, sqrt(mpc(1, -2 * y)))) / y
    direct = sqrt(2 / pi) / y * quad(lambda p: sin(p * y) / p * exp(-(p + 1 / p) / 2), [0, 1, 10, 40, 80, 120])
    print("fbeta1 xi(1) closed", mp.nstr(closed, 20), "direct", mp.nstr(direct, 20))

    # fbeta(1) lambda = 0 components
    m3 = quad(lambda p: p**3 * (exp(-(p + 1 / p) / 2) / p**2) ** 2, [0, 1, 10, 100])
    print("fbeta1 int p^3 f^2", mp.nstr(m3, 20))
    print("fbeta1 diag", mp.nstr(48 * pi**2 * sqrt(3) / 2 * m3, 20))
    print("fbeta1 mellin norm", mp.nstr(diagonalized(1, lambda x: 1, 40) / (48 * pi**2), 20))
    print("fbeta1 off", mp.nstr(diagonalized(1, w_off, 40), 20))
    print("fbeta1 reg(gamma=1)", mp.nstr(diagonalized(1, w_reg, 40), 20))

    # gaussian(1) off at lambda = 0, polar coordinates
    ang_off = quad(lambda t: cos(t) * sin(t) * log((1 + cos(t) * sin(t)) / (1 - cos(t) * sin(t))), [0, pi / 2])
    # f(p) f(q) = e^{-rho^2/2}: radial moment int rho^3 e^{-rho^2/2} = 2
    print("gaussian1 off", mp.nstr(-96 * pi * ang_off * 2, 20))
    print("gaussian1 diag", mp.nstr(12 * sqrt(3) * pi**2, 20))
    print("gaussian1 reg", mp.nstr(24 * pi**2, 20))

    # leading coefficient 48 pi^2 int |f^#_beta|^2 S for the collapse sweep
    for beta in [mpf("0.3"), mpf("0.5"), mpf(1)]:
        for gamma in [0, mpf("0.5"), mpf("0.7"), 2]:
            val = diagonalized(beta, lambda x: symbol(x, gamma), 40 / beta)
            print(f"c2 beta={beta} gamma={gamma}: {mp.nstr(val, 20)}")


if __name__ == "__main__":
    main()
