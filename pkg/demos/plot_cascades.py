"""
Cascading ModWD with classical enhancers
========================================

"A-B" runs enhancer A on the waveform and then enhancer B on A's output.
Every statistical stage estimates the noise again from the first frames of
its own input, so the two orders are different systems.
"""

import numpy as np

from modwd import CascadeSpec, cascade, mix_at_snr, segmental_snr
from modwd.synth import synth_speech, white_noise

clean = [synth_speech(2.0, seed=100 + i) for i in range(5)]
noisy = [mix_at_snr(c, white_noise(len(c), seed=200 + i), 10.0) for i, c in enumerate(clean)]

tokens = ["ss", "wf", "stsa", "logstsa",
          "ss-modwd:0.25", "modwd:0.25-ss", "logstsa-modwd:0.25", "modwd:0.25-logstsa"]

# %%
# Mean segmental SNR over the fixtures at 10 dB input SNR.
print(f"{'input':<22}{np.mean([segmental_snr(c, x) for c, x in zip(clean, noisy)]):8.3f} dB")
for token in tokens:
    spec = CascadeSpec.parse(token)
    score = np.mean([segmental_snr(c, cascade(spec, x)) for c, x in zip(clean, noisy)])
    print(f"{spec.label:<22}{score:8.3f} dB")

# %%
# The two orders of the same pair of stages do not produce the same waveform.
a = cascade(CascadeSpec.parse("modwd:0-ss"), noisy[0]).samples
b = cascade(CascadeSpec.parse("ss-modwd:0"), noisy[0]).samples
n = min(len(a), len(b))
print(f"\nRMS difference between the two orders: {np.sqrt(np.mean((a[:n] - b[:n]) ** 2)):.2e}")
