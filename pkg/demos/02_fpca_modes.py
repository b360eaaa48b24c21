"""Vertical, horizontal, and combined functional PCA on one dataset.

The sample mixes amplitude variability (bump heights) with phase
variability (random warps). Each PCA flavour sees a different slice:
vertical only the aligned amplitudes, horizontal only the warps, and
combined both, with the weight C trading them off.

Run:  python3 demos/02_fpca_modes.py
"""

import numpy as np

import elastic_fpcr as ef

rng = np.random.default_rng(1)
t = ef.uniform_grid(101)
family = []
for s in range(14):
    height = 3.5 + 0.8 * rng.standard_normal()
    f = ef.SampledFunction(t, height * np.exp(-((t - 0.4) ** 2) / (2 * 0.075**2)))
    family.append(ef.apply_warp(f, ef.random_warp(0.35, 100 + s, t)))

aligned = ef.align_set(family)

for name, model in (
    ("vertical  ", ef.vertical_fpca(aligned, 5)),
    ("horizontal", ef.horizontal_fpca(aligned, 5)),
    ("combined  ", ef.combined_fpca(aligned, 5)),
    ("standard  ", ef.standard_fpca(family, 5)),
):
    explained = model.singular_values / model.total_variance
    note = f"  C={model.phase_weight:.2f}" if model.phase_weight else ""
    print(f"{name} variance explained: "
          + " ".join(f"{v:5.1%}" for v in explained[:3]) + note)

print("\ncombined PCA, phase weight sweep (leading direction):")
n_grid = t.size
for c in (0.1, 1.0, None, 50.0):
    model = ef.combined_fpca(aligned, 3, phase_weight=c)
    lead = model.basis[:, 0]
    frac = np.sum(lead[n_grid:] ** 2) / np.sum(lead**2)
    label = "estimated" if c is None else f"C = {c}"
    print(f"  {label:>9} -> C = {model.phase_weight:6.2f}, phase-block energy {frac:5.1%}")

print("\nprincipal path of the combined model (component 1):")
model = ef.combined_fpca(aligned, 3)
for tau, (func, warp) in zip(
    (-1.0, 0.0, 1.0), ef.principal_paths(model, 1, (-1.0, 0.0, 1.0))
):
    composed = ef.apply_warp(func, warp)
    peak = t[int(np.argmax(composed.values))]
    print(f"  tau = {tau:+.0f}: peak height {composed.values.max():6.2f} at t = {peak:.3f}")
