"""Reference values frozen into the Rust tests.

Run with mpmath >= 1.3:  python3 reference_values.py
Each line printed is NAME = VALUE with 17 significant digits.
"""
import mpmath as mp

mp.mp.dps = 60
LAMBDA1 = 4 * mp.pi ** 2


def ml_series(a, b, z, eps=mp.mpf(10) ** -30):
    """Defining series of E_{a,b}(z), summed until terms fall below eps."""
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
    with mp.workdps(int(60 + abs(z) ** (1 / a) * 0.5)):
        s, k = mp.mpf(0), 0
        while True:
            term = z ** k * mp.rgamma(a * k + b)
            s += term
            if a * k + b > 2 and abs(term) < eps and k > abs(z) ** (1 / a):
                return +s
            k += 1


def ml_asymptotic(a, b, z):
    """-sum z^-k / Gamma(b - a k) for large negative z, 0 < a < 1, cut at the smallest term."""
    with mp.workdps(60):
        a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
        s, best = mp.mpf(0), None
        for k in range(1, 400):
            term = -z ** (-k) * mp.rgamma(b - a * k)
            if term != 0 and best is not None and abs(term) > best:
                break
            if term != 0:
                best = abs(term)
            s += term
        return s


def ml(a, b, z):
    if z < 0 and a < 1 and abs(z) ** (1 / a) > 200:
        return ml_asymptotic(a, b, z)
    return ml_series(a, b, z)


def mltf(a, b, lam, t):
    t = mp.mpf(t)
    return t ** (b - 1) * ml(a, b, -lam * t ** a)


def convolve(fa, fb, t):
    """int_0^t fa(t - s) fb(s) ds; tanh-sinh absorbs the endpoint singularities."""
    t = mp.mpf(t)
    return mp.quad(lambda s: fa(t - s) * fb(s), [0, t / 4, t / 2, 3 * t / 4, t])


def show(name, value):
    print(f"{name} = {mp.nstr(value, 17, min_fixed=-3, max_fixed=3)}")


show("ML_08_1_AT_M1", ml(0.8, 1, -1))
show("MLTF_07_09_39478_AT_05", mltf(0.7, 0.9, mp.mpf("39.478"), 0.5))

conv = convolve(lambda s: mltf(0.7, 0.7, LAMBDA1, s), lambda s: mltf(0.7, 1, LAMBDA1, s), 0.5)
show("CONV_07_07_WITH_07_1_AT_05", conv)

a0, a1 = mp.mpf("0.8"), mp.mpf("0.9")
t = mp.mpf("0.5")
show("U0_08_09_PHI1_F2_AT_05", t ** (a0 - 1) / mp.gamma(a0) + 2 * t ** (a0 + a1 - 1) / mp.gamma(a0 + a1))

show("U1_1_06_AT_02", mltf(0.6, 1, LAMBDA1, 0.2))

# Second family, (0.9, 0.8), phi2 = phi1 = 1, f = 0, t = 0.3.
rho = mp.mpf("0.7")
e0 = lambda s: mltf(rho, 0.9, LAMBDA1, s)
coupling = convolve(lambda s: mltf(rho, rho, LAMBDA1, s), e0, 0.3)
show("U2_09_08_AT_03", e0(0.3) + 2 * mp.sqrt(LAMBDA1) * coupling)

show("RL_03_OF_T07_AT_1", mp.gamma(1.7) / mp.gamma(2))
show("RL_03_OF_ONE_AT_1", 1 / mp.gamma(0.7))

# Terminal value of the sine mode for f = sin(2 pi x), phi = 0, (0.9, 0.8), T = 1.
show("PSI_SINE_09_08_T1", ml(0.7, 1.7, -LAMBDA1))

# sup over a log grid of (1 + x)|E_{a,b}(-x)|, x = 0 and 10^(-3 + 11 i / 220).
for a, b in [(0.5, 1), (0.7, 0.7), (0.7, 1), (0.7, 1.7), (0.9, 0.9)]:
    xs = [mp.mpf(0)] + [mp.mpf(10) ** (-3 + mp.mpf(11) * i / 220) for i in range(221)]
    c1 = max((1 + x) * abs(ml(a, b, -x)) for x in xs)
    show(f"C1[{a}, {b}]", c1)

# max over k in [4, 64] of amplification / lambda_k = 1 / (lambda_k E_{rho, rho+1}(-lambda_k)), T = 1.
for a0, a1 in [("0.9", "0.8"), ("1", "0.6"), ("0.7", "0.7"), ("1", "1")]:
    r = mp.mpf(a0) + mp.mpf(a1) - 1
    ratios = []
    for k in range(4, 65):
        lam = (2 * mp.pi * k) ** 2
        d = (1 - mp.exp(-lam)) / lam if r == 1 else ml(r, r + 1, -lam)
        ratios.append(1 / (lam * d))
    show(f"C2[{a0}, {a1}]", max(ratios))
