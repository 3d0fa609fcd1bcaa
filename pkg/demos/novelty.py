"""Watch an agent add a concept when the world shows it something new.

The world has three hidden states but the agent starts with two concepts.
When recent stimuli are too surprising under the current model, the agent
grows a fresh concept and learns what it predicts.

Run: python3 demos/novelty.py
"""

from knowgen import fixture, run_curriculum
from knowgen.inference import window_surprisal
from knowgen.knowledge import absorb_window

res = run_curriculum(fixture("novel-stimulus"))
for e in res.expansions:
    rep = e["report"]
    after = window_surprisal(absorb_window(e["agent"], e["window"]).model, e["window"])
    print(f"episode {e['episode']}: window surprisal {rep.window_surprisal:.3f} > threshold {rep.threshold:.3f}")
    print(f"  concepts {rep.n_before} -> {rep.n_after}; surprisal after absorbing the window {after:.3f}")
print(f"final model has {res.agent.model.n_concepts} concepts")
