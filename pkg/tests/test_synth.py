import numpy as np
import pytest

from speechsev.analysis import AnalysisConfig, analyze_pair
from speechsev.synth import DegradeKind, SynthKind, SynthSpec, degrade, generate


def test_zero_amplitude_sine():
    c = generate(SynthSpec(SynthKind.SINE_BURST, 800, amplitude=0.0))
    assert not c.samples.any()


def test_noise_seed_determinism():
    spec = SynthSpec(SynthKind.NOISE_BURST, 4000, amplitude=0.7, seed=99)
    assert generate(spec).samples.tobytes() == generate(spec).samples.tobytes()
    other = generate(SynthSpec(SynthKind.NOISE_BURST, 4000, amplitude=0.7, seed=100))
    assert other.samples.tobytes() != generate(spec).samples.tobytes()


def test_noise_bounds():
    x = generate(SynthSpec(SynthKind.NOISE_BURST, 5000, amplitude=0.3, seed=1)).samples
    assert np.abs(x).max() <= 0.3


def test_scaled_copy_peak():
    burst = generate(SynthSpec(SynthKind.SINE_BURST, 8000, amplitude=0.3, frequency=200))
    copy = generate(SynthSpec(SynthKind.SCALED_COPY, 8000, scale=2.0, source=burst))
    assert np.abs(copy.samples).max() == pytest.approx(2 * np.abs(burst.samples).max(), abs=1e-12)
    assert np.abs(copy.samples).max() == pytest.approx(0.6, abs=1e-12)


def test_scaled_copy_rejects_clipping():
    burst = generate(SynthSpec(SynthKind.SINE_BURST, 8000, amplitude=0.6, frequency=200))
    with pytest.raises(ValueError, match="full scale"):
        generate(SynthSpec(SynthKind.SCALED_COPY, 8000, scale=2.0, source=burst))


def test_fade_in_out():
    x = generate(SynthSpec(SynthKind.SINE_BURST, 1000, amplitude=1.0, frequency=1000)).samples
    assert x[0] == 0.0
    # inside the 100-sample ramps the magnitude is bounded by the ramp gain
    ramp = np.arange(100) / 100
    assert np.all(np.abs(x[:100]) <= ramp + 1e-15)
    assert np.all(np.abs(x[900:]) <= ramp[::-1] + 1e-15)


def test_composite_sum():
    a = SynthSpec(SynthKind.SINE_BURST, 500, amplitude=0.2, frequency=100)
    b = SynthSpec(SynthKind.NOISE_BURST, 500, amplitude=0.1, seed=5)
    c = generate(SynthSpec(SynthKind.COMPOSITE, 500, components=(a, b)))
    np.testing.assert_array_equal(c.samples, generate(a).samples + generate(b).samples)


def test_composite_rejects_clipping():
    a = SynthSpec(SynthKind.SINE_BURST, 500, amplitude=0.9, frequency=100)
    with pytest.raises(ValueError):
        generate(SynthSpec(SynthKind.COMPOSITE, 500, components=(a, a)))


@pytest.mark.parametrize("kw", [{"duration_samples": 0}, {"amplitude": 1.2}, {"sample_rate": 0}])
def test_spec_validation(kw):
    base = dict(kind=SynthKind.SINE_BURST, duration_samples=100)
    base.update(kw)
    with pytest.raises(ValueError):
        SynthSpec(**base)


class TestDegrade:
    burst = generate(SynthSpec(SynthKind.SINE_BURST, 8000, amplitude=0.6, frequency=220))

    def test_identity_scale(self):
        assert degrade(self.burst, DegradeKind.AMPLITUDE_SCALE, 1.0).samples.tobytes() == self.burst.samples.tobytes()

    def test_tail_drop(self):
        x = generate(SynthSpec(SynthKind.NOISE_BURST, 100, amplitude=0.5, seed=2))
        y = degrade(x, DegradeKind.TAIL_DROP, 0.5).samples
        assert not y[50:].any()
        np.testing.assert_array_equal(y[:50], x.samples[:50])

    @pytest.mark.parametrize("kind, mag", [("scale", 0.0), ("scale", 2.0), ("noise", 1.5), ("taildrop", -0.1)])
    def test_out_of_range(self, kind, mag):
        with pytest.raises(ValueError):
            degrade(self.burst, kind, mag)

    @staticmethod
    def noisy_ratio(amp, seed, **config):
        clean = generate(SynthSpec(SynthKind.SINE_BURST, 8000, amplitude=amp, frequency=220))
        noisy = degrade(clean, DegradeKind.ADDITIVE_NOISE, 0.01, seed=seed)
        return analyze_pair(clean, noisy, AnalysisConfig(**config), 1.0).raw_ratio

    @pytest.mark.xfail(strict=True, reason=(
        "max+min curve crosses zero inside every block; noise moves the "
        "crossings and per-sample ratios there blow up (observed 1.5 to 8.6)"))
    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("amp", [0.5, 0.8])
    def test_additive_noise_ratio_near_one(self, seed, amp):
        assert 0.9 <= self.noisy_ratio(amp, seed) <= 1.1

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("amp", [0.5, 0.8, 1.0 - 0.011])
    def test_additive_noise_biases_extrema_ratio_upward(self, seed, amp):
        # frozen from fixed-seed runs: always inflated, never below 1.5
        assert self.noisy_ratio(amp, seed) > 1.5

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("amp", [0.5, 0.8])
    def test_additive_noise_ratio_near_one_upper_rule(self, seed, amp):
        assert 0.9 <= self.noisy_ratio(amp, seed, anchor_rule="upper") <= 1.1

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.6])
    def test_pipeline_homogeneity_witness(self, alpha):
        scaled = degrade(self.burst, DegradeKind.AMPLITUDE_SCALE, alpha)
        r = analyze_pair(self.burst, scaled, AnalysisConfig(), 1.0).raw_ratio
        assert r == pytest.approx(alpha, abs=1e-9)
