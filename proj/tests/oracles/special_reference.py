#!/usr/bin/env python3
"""Reference values for the special-function tests.

Evaluates the complex gamma function, log-gamma, and the Weber parabolic
cylinder function D_nu(z) with mpmath at 40 digits and prints C++ frozen-value
tables to paste into tests/test_special.cpp.  Run from anywhere:

    python3 tests/oracles/special_reference.py
"""

import mpmath as mp

mp.mp.dps = 40


def cxx(z):
    z = mp.mpc(z)
    return f"complexd({mp.nstr(z.real, 17, strip_zeros=False)}, {mp.nstr(z.imag, 17, strip_zeros=False)})"


def emit_gamma():
    points = [
        mp.mpc("0.5"),
        mp.mpc(1, 1),
        mp.mpc(3, -2),
        mp.mpc(-1.5, 0.5),
        mp.mpc(-3.7, 0),
        mp.mpc(0.001, 0.001),
        mp.mpc(1, 10),
    ]
    print("// gamma_complex reference (mpmath, 40 digits)")
    for z in points:
        print(f"  {{{cxx(z)}, {cxx(mp.gamma(z))}}},")


def emit_log_gamma():
    points = [mp.mpc(0.5, 3), mp.mpc(2, -5), mp.mpc(10, 10), mp.mpc(1, 0.5)]
    print("// log_gamma reference (mpmath loggamma, principal branch)")
    for z in points:
        print(f"  {{{cxx(z)}, {cxx(mp.loggamma(z))}}},")


def emit_pcf():
    import cmath

    def ray(r, arg):
        return mp.mpc(r) * mp.e ** (mp.mpc(0, 1) * mp.mpf(arg) * mp.pi)

    nus = {
        "i/2": mp.mpc(0, 0.5),
        "-i/2": mp.mpc(0, -0.5),
        "1+i/2": mp.mpc(1, 0.5),
        "-0.3-0.2i": mp.mpc(-0.3, -0.2),
        "2.5": mp.mpc(2.5),
    }
    zs = {
        "small generic": mp.mpc(0.3, 0.1),
        "diag pi/4, r=2": ray(2, "0.25"),
        "diag 3pi/4, r=5": ray(5, "0.75"),
        "diag -pi/4, r=7.5": ray(7.5, "-0.25"),
        "diag 3pi/4, r=7.9 (series)": ray(7.9, "0.75"),
        "diag 3pi/4, r=8.1 (asymptotic)": ray(8.1, "0.75"),
        "diag -3pi/4, r=12": ray(12, "-0.75"),
        "diag pi/4, r=20": ray(20, "0.25"),
        "diag 3pi/4, r=40": ray(40, "0.75"),
        "diag -pi/4, r=57": ray(57, "-0.25"),
        "real 3": mp.mpc(3),
        "real -2.5": mp.mpc(-2.5),
        "real 6.5 (asymptotic)": mp.mpc(6.5),
        "imag 9": mp.mpc(0, 9),
    }
    print("// pcf_d reference (mpmath pcfd, 40 digits): nu, z, D_nu(z)")
    for zname, z in zs.items():
        for nuname, nu in nus.items():
            d = mp.pcfd(nu, z)
            print(f"  {{{cxx(nu)}, {cxx(z)}, {cxx(d)}}},  // nu={nuname}, z={zname}")


def emit_wronskian():
    print("// Wronskian W{D_nu(z), D_nu(-z)} = sqrt(2/pi)... reference value")
    nu = mp.mpc(0, 0.5)
    z = mp.mpc(1, 1)
    w = mp.pcfd(nu, z) * (-mp.diff(lambda t: mp.pcfd(nu, t), -z)) - mp.diff(
        lambda t: mp.pcfd(nu, t), z
    ) * mp.pcfd(nu, -z)
    print(f"  // numeric W at one point: {cxx(w)}")
    print(f"  // sqrt(2 pi)/Gamma(-nu):  {cxx(mp.sqrt(2 * mp.pi) / mp.gamma(-nu))}")


if __name__ == "__main__":
    emit_gamma()
    print()
    emit_log_gamma()
    print()
    emit_pcf()
    print()
    emit_wronskian()
