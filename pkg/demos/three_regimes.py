"""Run the declarative, procedural and conditional fixtures side by side.

Run: python3 demos/three_regimes.py
"""

import numpy as np

from knowgen import classify_regime, fixture, run_curriculum

for name in ("discrimination-2x2", "tmaze", "cue-conditional"):
    sc = fixture(name)
    res = run_curriculum(sc)
    s = res.summary
    curve = np.asarray(s["surprisal_curve"])
    print(f"{name} ({classify_regime(sc.regime)}), seed {sc.seed}")
    print(f"  mean surprisal: first 20 episodes {curve[:20].mean():.3f}, last 20 {curve[-20:].mean():.3f}")
    freq = ", ".join(f"{phase} {v:.2f}" for phase, v in s["preferred_frequency"].items() if v is not None)
    if freq:
        print(f"  preferred outcome reached: {freq}")
    A = np.array2string(res.agent.model.A, precision=2, suppress_small=True, prefix="    ")
    print(f"  learned A:\n    {A}")
