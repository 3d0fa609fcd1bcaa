"""Score a few concept-stimulus matrices across lambda and find the optimum.

Run: python3 demos/semantic_landscape.py
"""

import numpy as np

from knowgen import ConceptStimulusMatrix, lambda_profile, optimize_matrix, synsets, transfer_energy

MATRICES = {
    "one-to-one": np.eye(3),
    "one word for all": np.ones((1, 3)),
    "synonyms": [[1, 1, 0], [1, 1, 0], [0, 0, 1]],
    "polysemy": [[1, 1, 1], [0, 0, 1], [0, 1, 0]],
}

for name, entries in MATRICES.items():
    csm = ConceptStimulusMatrix(np.asarray(entries, dtype=float))
    r = transfer_energy(csm)
    print(f"{name:>17}: I={r.information:.3f}  H(S)={r.concept_entropy:.3f}  omega={r.omega:+.3f}  synsets={synsets(csm)}")

print("\nomega(lambda) is a straight line between H(S) and -I:")
for r in lambda_profile(ConceptStimulusMatrix(np.asarray(MATRICES["polysemy"], float)), 6):
    print(f"  lambda={r.lam:.1f}  omega={r.omega:+.4f}")

print("\nbest 4x4 binary matrix per lambda (greedy bit flips, 8 restarts):")
for lam in (0.0, 0.41, 0.7, 1.0):
    csm, r = optimize_matrix(4, 4, lam, np.random.default_rng(0))
    rows = ["".join(str(int(v)) for v in row) for row in csm.entries]
    print(f"  lambda={lam:.2f}  omega={r.omega:+.4f}  rows={rows}")
