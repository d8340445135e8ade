"""The two truncated radius laws.

Shows the closed-form tail and conditional probabilities, checks them against
brute numeric summation/sampling, and demonstrates the two estimates that
power the cut-probability analysis: tail(beta) <= 4 exp(-lam beta) and
conditional(alpha, beta) <= 2 lam beta inside the regime
(M - l) lam >= 2, l lam <= 1.
"""

import math

import numpy as np

import padlab as pl

print("== truncated exponential on [3, 50], rate 0.1 ==")
texp = pl.TexpParams(0.1, 3.0, 50.0)
print(f"in estimate regime: {texp.in_estimate_regime}")
for beta in (3.0, 10.0, 25.0, 50.0):
    tail = pl.texp_tail(texp, beta)
    print(f"P[t >= {beta:4g}] = {tail:.6f}   4e^-lam*beta = {4*math.exp(-0.1*beta):.6f}")

samples = pl.sample_texp(texp, np.random.default_rng(0), 200_000)
emp = (samples >= 10.0).mean()
print(f"empirical P[t >= 10] from 200k draws: {emp:.6f} "
      f"(closed form {pl.texp_tail(texp, 10.0):.6f})")

print("\n== conditional overshoot probabilities ==")
for alpha, beta in [(5.0, 2.0), (10.0, 2.0), (20.0, 2.0)]:
    c = pl.texp_conditional(texp, alpha, beta)
    print(f"P[t <= {alpha+beta:4g} | t >= {alpha:4g}] = {c:.6f}   2*lam*beta = {0.2*beta:.3f}")

print("\n== truncated geometric on {1..100}, p = 0.05 ==")
tgeo = pl.TgeoParams(0.05, 100)
total = math.fsum(pl.tgeo_pmf(tgeo, n) for n in range(1, 101))
print(f"numeric sum of the {tgeo.M} masses: {total!r} (closed form telescopes to 1)")
print(f"P[t >= 20] = {pl.tgeo_tail(tgeo, 20):.6f}")
print(f"P[t <= 12 | t >= 10] = {pl.tgeo_conditional(tgeo, 10, 2):.6f} "
      f"= 1-(1-p)^3 = {1 - 0.95**3:.6f}")

draws = pl.sample_tgeo(tgeo, np.random.default_rng(1), 200_000)
print(f"200k draws: mean {draws.mean():.2f}, mass at truncation point "
      f"{(draws == 100).mean():.5f} vs pmf {pl.tgeo_pmf(tgeo, 100):.5f}")
