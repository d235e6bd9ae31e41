"""NCCF pitch tracking with dynamic programming

Each frame contributes up to n_candidates voiced hypotheses (local maxima of
the normalized cross-correlation above a threshold) plus one unvoiced
hypothesis. A Viterbi pass picks the cheapest path, where local costs favour
strong correlation peaks (and, among peaks close to the best, the shortest
lag) and transition costs penalize octave jumps and voicing switches.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class PitchConfig:
    f0_min: float = 50.0
    f0_max: float = 400.0
    window_s: float = 0.010
    hop_s: float = 0.005
    n_candidates: int = 5
    candidate_threshold: float = 0.3
    switch_penalty: float = 0.2
    octave_penalty: float = 0.35
    unvoiced_bias: float = 0.0
    lag_weight: float = 0.02
    octave_ratio: float = 0.9
    sample_rate: int = 16000

    def __post_init__(self):
        if not 0.0 < self.f0_min < self.f0_max < self.sample_rate / 2.0:
            raise ValueError(f"invalid F0 search range {self.f0_min}-{self.f0_max} Hz")
        if self.n_candidates < 1:
            raise ValueError(f"n_candidates must be >= 1, got {self.n_candidates}")
        if not 0.0 < self.octave_ratio <= 1.0:
            raise ValueError(f"octave_ratio must be in (0, 1], got {self.octave_ratio}")

    @property
    def min_lag(self) -> int:
        return int(math.floor(self.sample_rate / self.f0_max))

    @property
    def max_lag(self) -> int:
        return int(math.ceil(self.sample_rate / self.f0_min))

    @property
    def window(self) -> int:
        return int(round(self.window_s * self.sample_rate))

    @property
    def hop(self) -> int:
        return int(round(self.hop_s * self.sample_rate))

    @property
    def frame_span(self) -> int:
        """Samples one frame needs: correlation window plus the longest lag"""
        return self.window + self.max_lag


@dataclass(frozen=True)
class PitchFrame:
    time_s: float
    f0: float | None  # None when unvoiced
    nccf_peak: float
    voicing_prob: float
    local_cost: float

    @property
    def voiced(self) -> bool:
        return self.f0 is not None


@dataclass
class PitchTrack:
    frames: list[PitchFrame] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.frames)

    def f0_values(self) -> np.ndarray:
        """F0 per frame, NaN where unvoiced"""
        return np.array([f.f0 if f.f0 is not None else np.nan for f in self.frames])

    def voiced_mask(self) -> np.ndarray:
        return np.array([f.voiced for f in self.frames], dtype=bool)

    def median_f0(self) -> float | None:
        voiced = [f.f0 for f in self.frames if f.f0 is not None]
        return float(np.median(voiced)) if voiced else None

    def pncc(self) -> float:
        """Largest per-frame NCCF peak"""
        return max((f.nccf_peak for f in self.frames), default=0.0)

    def voiced_pncc(self) -> float:
        """Largest NCCF peak among voiced frames; 0 for an unvoiced track"""
        return max((f.nccf_peak for f in self.frames if f.voiced), default=0.0)


def nccf(frame: np.ndarray, lag_range: tuple[int, int], window: int | None = None) -> np.ndarray:
    """phi(k) for k in lag_range (inclusive) over a correlation window starting at frame[0]

    Windows with zero energy give 0. The window defaults to everything the
    longest lag leaves over.
    """
    frame = np.asarray(frame, dtype=np.float64)
    min_lag, max_lag = lag_range
    if not 0 <= min_lag <= max_lag:
        raise ValueError(f"invalid lag range {lag_range}")
    if window is None:
        window = len(frame) - max_lag
    if window < 1 or len(frame) < window + max_lag:
        raise ValueError(f"frame of {len(frame)} samples too short for window {window} and max lag {max_lag}")

    ref = frame[:window]
    shifted = sliding_window_view(frame[: window + max_lag], window)[min_lag : max_lag + 1]
    num = shifted @ ref
    denom = np.sqrt(float(ref @ ref) * np.einsum("ij,ij->i", shifted, shifted))
    out = np.zeros(len(num))
    ok = denom > np.finfo(np.float64).tiny
    out[ok] = num[ok] / denom[ok]
    return np.clip(out, -1.0, 1.0)


def _candidates(phi: np.ndarray, config: PitchConfig) -> list[tuple[float, float, float]]:
    """(refined lag, refined phi, score) of the strongest local maxima above threshold

    Peaks within octave_ratio of the best one all score as the best peak, so
    the lag weight hands the frame to the shortest of them. Period multiples
    landing on whole-sample lags otherwise outscore the true period.
    """
    peaks: list[tuple[float, float]] = []
    last = len(phi) - 1
    for i in range(len(phi)):
        if phi[i] < config.candidate_threshold:
            continue
        left = phi[i - 1] if i > 0 else -np.inf
        right = phi[i + 1] if i < last else -np.inf
        if not (phi[i] >= left and phi[i] > right):
            continue
        lag, value = float(i), float(phi[i])
        if 0 < i < last:
            curvature = left - 2.0 * phi[i] + right
            if curvature < 0:
                delta = 0.5 * (left - right) / curvature
                lag += delta
                value = min(1.0, float(phi[i] - 0.25 * (left - right) * delta))
        peaks.append((lag + config.min_lag, value))
    if not peaks:
        return []
    best = max(value for _, value in peaks)
    scored = [(lag, value, best if value >= config.octave_ratio * best else value) for lag, value in peaks]
    scored.sort(key=lambda p: (-p[2], p[0]))
    return scored[: config.n_candidates]


def track_pitch(signal: np.ndarray, config: PitchConfig | None = None) -> PitchTrack:
    """Frame-wise F0, PNCC and voicing probability; deterministic

    Signals shorter than one frame are zero-padded to one frame.
    """
    config = config or PitchConfig()
    signal = np.asarray(signal, dtype=np.float64)
    span = config.frame_span
    if len(signal) < span:
        signal = np.concatenate([signal, np.zeros(span - len(signal))])
    n_frames = 1 + (len(signal) - span) // config.hop
    lags = (config.min_lag, config.max_lag)

    # per frame: list of (f0 or None, phi, local cost); index 0 is unvoiced
    states: list[list[tuple[float | None, float, float]]] = []
    peaks: list[float] = []
    for i in range(n_frames):
        start = i * config.hop
        phi = nccf(signal[start : start + span], lags, config.window)
        peak = float(phi.max())
        peaks.append(peak)
        frame_states: list[tuple[float | None, float, float]] = [(None, 0.0, config.unvoiced_bias + max(0.0, peak))]
        for lag, value, score in _candidates(phi, config):
            f0 = config.sample_rate / lag
            if config.f0_min <= f0 <= config.f0_max:
                frame_states.append((f0, value, 1.0 - score + config.lag_weight * lag / config.max_lag))
        states.append(frame_states)

    def transition(prev: float | None, curr: float | None) -> float:
        if prev is None and curr is None:
            return 0.0
        if prev is None or curr is None:
            return config.switch_penalty
        return config.octave_penalty * abs(math.log2(curr / prev))

    cost = [s[2] for s in states[0]]
    back: list[list[int]] = [[0] * len(states[0])]
    for i in range(1, n_frames):
        new_cost, pointers = [], []
        for f0, _, local in states[i]:
            options = [cost[j] + transition(states[i - 1][j][0], f0) for j in range(len(states[i - 1]))]
            best = int(np.argmin(options))
            new_cost.append(options[best] + local)
            pointers.append(best)
        cost, back = new_cost, back + [pointers]

    path = [int(np.argmin(cost))]
    for i in range(n_frames - 1, 0, -1):
        path.append(back[i][path[-1]])
    path.reverse()

    frames = []
    for i, j in enumerate(path):
        f0, value, local = states[i][j]
        time_s = (i * config.hop + config.window / 2.0) / config.sample_rate
        frames.append(PitchFrame(time_s, f0, peaks[i], max(0.0, value) if f0 is not None else 0.0, local))
    return PitchTrack(frames)
