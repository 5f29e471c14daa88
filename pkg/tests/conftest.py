import sys

import numpy as np
import pytest

from modwd.signal_io import PcmSignal, mix_at_snr
from modwd.synth import synth_speech, white_noise


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def speech():
    return synth_speech(2.0, seed=7)


@pytest.fixture(scope="session")
def noisy_speech(speech):
    return mix_at_snr(speech, white_noise(len(speech), seed=11), 10.0)


@pytest.fixture
def random_signal(rng):
    return PcmSignal(rng.uniform(-0.5, 0.5, 4000), 8000)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
