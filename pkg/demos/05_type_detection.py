"""Automatic distribution detection on unlabeled columns.

A decision tree over value structure (binary? integer counts? positive?)
narrows the candidates, then moment-generating-function proximity settles
gamma vs gaussian.  Also demonstrates the fitted-parameter output and the
CLI equivalent ``mixedmc detect --data file.csv``.
"""

import numpy as np

from mixedmc import detect, fit_mle, mgf_distance

rng = np.random.default_rng(7)
n = 10_000

columns = {
    "likes":     (rng.random(n) < 0.35).astype(float),
    "visits":    rng.poisson(4.0, n).astype(float),
    "claims":    rng.negative_binomial(2, 0.3, n).astype(float),
    "durations": rng.gamma(2.0, 3.0, n),
    "scores":    rng.normal(1.0, 2.0, n),
}

print("=== detection reports ===")
for name, values in columns.items():
    report = detect(values)
    print(f"{name:10s} -> {report.to_text()}")

print("\n=== dispersion separates the count kinds ===")
for name in ("visits", "claims"):
    v = columns[name]
    print(f"{name:10s} var/mean = {v.var() / v.mean():.2f} "
          f"(poisson would be 1, larger means overdispersion)")

print("\n=== MGF proximity separates gamma from gaussian ===")
dur = columns["durations"]
for kind in ("gamma", "gaussian"):
    params = fit_mle(kind, dur)
    print(f"{kind:10s} fit {params} -> distance {mgf_distance(dur, kind, params):.3e}")
