"""
The four spectrogram stages
===========================

Original magnitude, approximation plane, detail plane and the alpha = 0
reconstruction for one noisy utterance. Needs matplotlib; writes
``spectrogram_stages.png`` next to the working directory.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from modwd import ModwdConfig, mix_at_snr
from modwd.pipeline import spectrogram_stages
from modwd.synth import synth_speech, white_noise

clean = synth_speech(2.0, seed=3)
noisy = mix_at_snr(clean, white_noise(len(clean), seed=4), 10.0)
stages = spectrogram_stages(noisy, ModwdConfig(0.0))

# %%
# Frames run along x; the coefficient planes have half as many columns.
fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharey=True)
for ax, (name, plane) in zip(axes.ravel(), stages.as_dict().items()):
    db = 20 * np.log10(np.abs(plane).T + 1e-6)
    ax.imshow(db, origin="lower", aspect="auto", vmin=db.max() - 70, vmax=db.max(), cmap="magma")
    ax.set_title(name)
    ax.set_xlabel("frame / coefficient index")
axes[0, 0].set_ylabel("bin")
axes[1, 0].set_ylabel("bin")
fig.tight_layout()
fig.savefig("spectrogram_stages.png", dpi=120)
print("wrote spectrogram_stages.png")
