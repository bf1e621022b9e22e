#include "voicemark/acoustic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "voicemark/simd/kernels.hpp"

namespace voicemark::acoustic {
namespace {

// Normalized autocorrelation of Hann-windowed frames, corrected by the
// autocorrelation of the window itself.
class FrameAnalyzer {
 public:
  FrameAnalyzer(const audio::AudioBuffer& buf, double floor, double ceiling, const AcousticConfig& cfg)
      : buf_(buf), cfg_(cfg) {
    const double sr = buf.sample_rate;
    window_len_ = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(cfg.window * sr)));
    hop_len_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.hop * sr)));
    min_lag_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sr / ceiling)));
    max_lag_ = std::min(window_len_ - 2, static_cast<std::size_t>(std::ceil(sr / floor)));
    window_.resize(window_len_);
    for (std::size_t k = 0; k < window_len_; ++k) {
      window_[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(window_len_ - 1));
    }
    window_acf_.assign(max_lag_ + 2, 0.0);
    const double w0 = simd::sum_squares(window_);
    for (std::size_t lag = 0; lag < window_acf_.size() && lag < window_len_; ++lag) {
      window_acf_[lag] = simd::dot(std::span<const double>(window_).first(window_len_ - lag),
                                   std::span<const double>(window_).subspan(lag)) / w0;
    }
    global_peak_ = simd::max_abs(buf.samples);
    frame_.resize(window_len_);
    acf_.assign(max_lag_ + 2, 0.0);
  }

  [[nodiscard]] std::size_t frame_count() const noexcept {
    return buf_.size() < window_len_ ? 0 : (buf_.size() - window_len_) / hop_len_ + 1;
  }
  [[nodiscard]] double frame_time(std::size_t i) const noexcept {
    return (static_cast<double>(i * hop_len_) + 0.5 * static_cast<double>(window_len_)) / buf_.sample_rate;
  }
  [[nodiscard]] std::size_t min_lag() const noexcept { return min_lag_; }
  [[nodiscard]] std::size_t max_lag() const noexcept { return max_lag_; }

  // Loads frame i; false when the frame is silent relative to the global peak.
  bool load(std::size_t i) {
    const double* x = buf_.samples.data() + i * hop_len_;
    const double mean = simd::active().sum(x, window_len_) / static_cast<double>(window_len_);
    local_peak_ = 0.0;
    for (std::size_t k = 0; k < window_len_; ++k) {
      frame_[k] = x[k] - mean;
      local_peak_ = std::max(local_peak_, std::fabs(frame_[k]));
      frame_[k] *= window_[k];
    }
    if (global_peak_ <= 0.0 || local_peak_ < cfg_.silence_threshold * global_peak_) return false;
    energy_ = simd::sum_squares(frame_);
    if (energy_ <= 0.0) return false;
    const auto& k = simd::active();
    for (std::size_t lag = min_lag_ - 1; lag <= max_lag_ + 1 && lag < window_len_; ++lag) {
      acf_[lag] = k.dot(frame_.data(), frame_.data() + lag, window_len_ - lag) / energy_ / window_acf_[lag];
    }
    return true;
  }

  // Local peak of the last loaded frame relative to the global peak.
  [[nodiscard]] double relative_peak() const noexcept { return global_peak_ > 0.0 ? local_peak_ / global_peak_ : 0.0; }

  [[nodiscard]] double acf(std::size_t lag) const noexcept { return acf_[lag]; }

  struct Peak {
    double lag = 0.0;
    double value = 0.0;
  };

  // Parabolic refinement of the correlation peak at integer lag `lag`.
  [[nodiscard]] Peak refine(std::size_t lag) const noexcept {
    const double left = acf_[lag - 1];
    const double mid = acf_[lag];
    const double right = acf_[lag + 1];
    const double curvature = left - 2.0 * mid + right;
    if (curvature >= 0.0) return {static_cast<double>(lag), mid};
    const double delta = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
    return {static_cast<double>(lag) + delta, mid - 0.25 * (left - right) * delta};
  }

 private:
  const audio::AudioBuffer& buf_;
  const AcousticConfig& cfg_;
  std::size_t window_len_ = 0;
  std::size_t hop_len_ = 0;
  std::size_t min_lag_ = 0;
  std::size_t max_lag_ = 0;
  std::vector<double> window_;
  std::vector<double> window_acf_;
  std::vector<double> frame_;
  std::vector<double> acf_;
  double global_peak_ = 0.0;
  double local_peak_ = 0.0;
  double energy_ = 0.0;
};

struct VoicedRun {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

std::vector<VoicedRun> voiced_runs(const PitchTrack& track) {
  std::vector<VoicedRun> runs;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!track.voiced[i]) continue;
    if (!runs.empty() && runs.back().last + 1 == i) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  return runs;
}

std::size_t to_sample(double t, int sample_rate, std::size_t limit) {
  const double s = std::round(t * sample_rate);
  if (s <= 0.0) return 0;
  return std::min(limit, static_cast<std::size_t>(s));
}

// Mean absolute successive difference over runs, divided by the mean value.
double perturbation(const std::vector<std::vector<double>>& runs) {
  double diff_sum = 0.0;
  std::size_t diff_count = 0;
  double value_sum = 0.0;
  std::size_t value_count = 0;
  for (const auto& run : runs) {
    if (run.size() < 2) continue;
    for (std::size_t i = 0; i + 1 < run.size(); ++i) diff_sum += std::fabs(run[i] - run[i + 1]);
    diff_count += run.size() - 1;
    for (double v : run) value_sum += v;
    value_count += run.size();
  }
  if (diff_count == 0 || value_sum <= 0.0) return 0.0;
  return (diff_sum / static_cast<double>(diff_count)) / (value_sum / static_cast<double>(value_count));
}

}  // namespace

std::size_t PitchTrack::voiced_count() const noexcept {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

std::vector<std::pair<std::string, double>> AcousticFeatures::named() const {
  return {{"ZCR", ZCR},
          {"F0_mean", F0_mean},
          {"F0_range", F0_range},
          {"F0_var", F0_var},
          {"F0_std", F0_std},
          {"Intensity_mean", Intensity_mean},
          {"Intensity_std", Intensity_std},
          {"Jitter_local", Jitter_local},
          {"Shimmer_local", Shimmer_local},
          {"HNR", HNR},
          {"PVI", PVI},
          {"duration", duration},
          {"Phonation_rate", Phonation_rate},
          {"pause_count", pause_count},
          {"pause_short", pause_short},
          {"pause_medium", pause_medium},
          {"pause_long", pause_long},
          {"pause_mean", pause_mean},
          {"pause_speech_ratio", pause_speech_ratio},
          {"articulation_rate", articulation_rate},
          {"speech_entropy", speech_entropy}};
}

PitchTrack detect_pitch(const audio::AudioBuffer& buf, double floor, double ceiling,
                        const AcousticConfig& cfg) {
  if (!(floor > 0.0) || !(floor < ceiling)) {
    throw std::invalid_argument("detect_pitch: need 0 < floor < ceiling");
  }
  if (buf.sample_rate <= 0) throw std::invalid_argument("detect_pitch: bad sample rate");
  PitchTrack track;
  track.frame_hop = cfg.hop;
  track.window = cfg.window;
  track.floor = floor;
  track.ceiling = ceiling;

  FrameAnalyzer frames(buf, floor, ceiling, cfg);
  const std::size_t n = frames.frame_count();
  track.frame_times.resize(n);
  track.f0.assign(n, 0.0);
  track.voiced.assign(n, false);
  if (frames.min_lag() + 1 > frames.max_lag()) return track;

  struct Candidate {
    double f0 = 0.0;  // 0 for the unvoiced candidate
    double strength = 0.0;
  };
  const double sr = buf.sample_rate;
  std::vector<std::vector<Candidate>> candidates(n);
  for (std::size_t i = 0; i < n; ++i) {
    track.frame_times[i] = frames.frame_time(i);
    auto& cands = candidates[i];
    if (!frames.load(i)) {
      cands.push_back({0.0, cfg.voicing_threshold + 2.0});
      continue;
    }
    const double quiet = 2.0 - frames.relative_peak() / (cfg.silence_threshold / (1.0 + cfg.voicing_threshold));
    cands.push_back({0.0, cfg.voicing_threshold + std::max(0.0, quiet)});
    for (std::size_t lag = frames.min_lag(); lag <= frames.max_lag(); ++lag) {
      const double r = frames.acf(lag);
      if (r < frames.acf(lag - 1) || r < frames.acf(lag + 1)) continue;
      const auto peak = frames.refine(lag);
      if (peak.value < 0.5 * cfg.voicing_threshold) continue;
      const double f0 = sr / peak.lag;
      if (f0 < floor || f0 > ceiling) continue;
      cands.push_back({f0, peak.value - cfg.octave_cost * std::log2(floor * peak.lag / sr)});
    }
    const auto keep = static_cast<std::size_t>(std::max(1, cfg.max_candidates)) + 1;
    if (cands.size() > keep) {
      std::partial_sort(cands.begin() + 1, cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                        [](const Candidate& a, const Candidate& b) { return a.strength > b.strength; });
      cands.resize(keep);
    }
  }
  if (n == 0) return track;

  // Viterbi over candidates; costs are scaled to a 10 ms hop.
  const double step_scale = 0.01 / cfg.hop;
  const auto transition = [&](const Candidate& a, const Candidate& b) {
    const bool va = a.f0 > 0.0, vb = b.f0 > 0.0;
    if (!va && !vb) return 0.0;
    if (va != vb) return cfg.voiced_unvoiced_cost * step_scale;
    return cfg.octave_jump_cost * std::fabs(std::log2(a.f0 / b.f0)) * step_scale;
  };
  std::vector<std::vector<double>> score(n);
  std::vector<std::vector<int>> back(n);
  score[0].resize(candidates[0].size());
  back[0].assign(candidates[0].size(), -1);
  for (std::size_t c = 0; c < candidates[0].size(); ++c) score[0][c] = candidates[0][c].strength;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& prev = candidates[i - 1];
    const auto& cur = candidates[i];
    score[i].assign(cur.size(), -1e300);
    back[i].assign(cur.size(), 0);
    for (std::size_t c = 0; c < cur.size(); ++c) {
      for (std::size_t p = 0; p < prev.size(); ++p) {
        const double v = score[i - 1][p] - transition(prev[p], cur[c]);
        if (v > score[i][c]) {
          score[i][c] = v;
          back[i][c] = static_cast<int>(p);
        }
      }
      score[i][c] += cur[c].strength;
    }
  }
  int c = static_cast<int>(std::max_element(score[n - 1].begin(), score[n - 1].end()) - score[n - 1].begin());
  for (std::size_t i = n; i-- > 0;) {
    const Candidate& chosen = candidates[i][static_cast<std::size_t>(c)];
    if (chosen.f0 > 0.0) {
      track.f0[i] = chosen.f0;
      track.voiced[i] = true;
    }
    c = back[i][static_cast<std::size_t>(c)];
  }
  return track;
}

PitchTrack detect_pitch(const audio::AudioBuffer& buf, const AcousticConfig& cfg) {
  return detect_pitch(buf, cfg.pitch_floor, cfg.pitch_ceiling, cfg);
}

F0Stats f0_statistics(const PitchTrack& track) {
  std::vector<double> values;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (track.voiced[i]) values.push_back(track.f0[i]);
  }
  F0Stats s;
  if (values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  s.range = *hi - *lo;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  s.var = s.std * s.std;
  return s;
}

IntensityStats intensity_statistics(const audio::AudioBuffer& buf, const AcousticConfig& cfg) {
  constexpr double kFloorDb = -40.0;
  constexpr double kSilentRms = 1e-6;
  IntensityStats out{kFloorDb, 0.0};
  if (buf.empty() || buf.sample_rate <= 0) return out;
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.intensity_window * buf.sample_rate)));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.hop * buf.sample_rate)));
  const std::span<const double> x(buf.samples);

  std::vector<double> db;
  auto frame_db = [&](std::span<const double> frame) {
    const double rms = std::sqrt(simd::sum_squares(frame) / static_cast<double>(frame.size()));
    return rms <= kSilentRms ? kFloorDb : 20.0 * (std::log10(rms) + 4.0);
  };
  if (x.size() < win) {
    db.push_back(frame_db(x));
  } else {
    for (std::size_t start = 0; start + win <= x.size(); start += hop) db.push_back(frame_db(x.subspan(start, win)));
  }
  double total = 0.0;
  for (double v : db) total += v;
  out.mean = total / static_cast<double>(db.size());
  double ss = 0.0;
  for (double v : db) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(db.size()));
  return out;
}

double jitter_from_periods(std::span<const double> periods) {
  return perturbation({std::vector<double>(periods.begin(), periods.end())});
}

double jitter_local(const PitchTrack& track) {
  std::vector<std::vector<double>> runs;
  for (const auto& run : voiced_runs(track)) {
    std::vector<double> periods;
    for (std::size_t i = run.first; i <= run.last; ++i) periods.push_back(1.0 / track.f0[i]);
    runs.push_back(std::move(periods));
  }
  return perturbation(runs);
}

double shimmer_from_amplitudes(std::span<const double> amplitudes) {
  return perturbation({std::vector<double>(amplitudes.begin(), amplitudes.end())});
}

std::vector<std::vector<double>> cycle_amplitudes(const audio::AudioBuffer& buf, const PitchTrack& track) {
  std::vector<std::vector<double>> out;
  if (track.size() == 0 || buf.empty()) return out;
  const double sr = buf.sample_rate;
  const auto& x = buf.samples;
  const double t0 = track.frame_times.front();
  const auto peak_in = [&](double from, double to) {
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(from)));
    const auto hi = std::min(x.size(), static_cast<std::size_t>(std::ceil(to)));
    std::size_t arg = lo;
    for (std::size_t n = lo; n < hi; ++n) {
      if (std::fabs(x[n]) > std::fabs(x[arg])) arg = n;
    }
    return arg;
  };
  // Peak value with parabolic refinement; the refined position is returned through `where`.
  const auto refined = [&](std::size_t arg, double& where) {
    double amp = std::fabs(x[arg]);
    where = static_cast<double>(arg);
    if (arg > 0 && arg + 1 < x.size()) {
      const double l = std::fabs(x[arg - 1]);
      const double r = std::fabs(x[arg + 1]);
      const double curvature = l - 2.0 * amp + r;
      if (curvature < 0.0) {
        const double delta = std::clamp(0.5 * (l - r) / curvature, -0.5, 0.5);
        amp -= 0.25 * (l - r) * delta;
        where += delta;
      }
    }
    return amp;
  };
  for (const auto& run : voiced_runs(track)) {
    const double start = static_cast<double>(to_sample(track.frame_times[run.first] - 0.5 * track.frame_hop, buf.sample_rate, x.size()));
    const double end = static_cast<double>(to_sample(track.frame_times[run.last] + 0.5 * track.frame_hop, buf.sample_rate, x.size()));
    const auto period_at = [&](double pos) {
      const double frame_pos = std::round((pos / sr - t0) / track.frame_hop);
      const auto k = static_cast<std::size_t>(std::clamp(frame_pos, static_cast<double>(run.first), static_cast<double>(run.last)));
      return sr / track.f0[k];
    };
    std::vector<double> amps;
    double period = period_at(start);
    if (start + period > end) {
      out.push_back(std::move(amps));
      continue;
    }
    // Cycles are tracked peak to peak, so the grid follows the waveform rather than the frame phase.
    double where = 0.0;
    double amp = refined(peak_in(start, start + period), where);
    while (true) {
      amps.push_back(amp);
      period = period_at(where);
      const double lo = where + 0.75 * period;
      const double hi = where + 1.25 * period;
      if (hi > end) break;
      amp = refined(peak_in(lo, hi), where);
    }
    out.push_back(std::move(amps));
  }
  return out;
}

double shimmer_local(const audio::AudioBuffer& buf, const PitchTrack& track) {
  return perturbation(cycle_amplitudes(buf, track));
}

double hnr(const audio::AudioBuffer& buf, const PitchTrack& track, const AcousticConfig& cfg) {
  if (track.voiced_count() == 0 || buf.empty()) return 0.0;
  AcousticConfig frame_cfg = cfg;
  frame_cfg.window = track.window;
  frame_cfg.hop = track.frame_hop;
  FrameAnalyzer frames(buf, track.floor, track.ceiling, frame_cfg);
  const std::size_t n = std::min(frames.frame_count(), track.size());
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!track.voiced[i]) continue;
    double r = 0.0;
    if (frames.load(i)) {
      const double lag = buf.sample_rate / track.f0[i];
      const auto center = static_cast<std::size_t>(std::clamp(std::round(lag), static_cast<double>(frames.min_lag()),
                                                              static_cast<double>(frames.max_lag())));
      r = frames.refine(center).value;
    }
    r = std::clamp(r, 1e-6, 1.0 - 1e-6);
    total += 10.0 * std::log10(r / (1.0 - r));
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double zcr(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  int previous = 0;
  std::size_t changes = 0;
  for (double v : samples) {
    const int sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) ++changes;
    previous = sign;
  }
  return static_cast<double>(changes) / static_cast<double>(samples.size() - 1);
}

std::vector<double> voiced_samples(const audio::AudioBuffer& buf, const PitchTrack& track) {
  std::vector<double> out;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!track.voiced[i]) continue;
    const auto lo = to_sample(track.frame_times[i] - 0.5 * track.frame_hop, buf.sample_rate, buf.size());
    const auto hi = to_sample(track.frame_times[i] + 0.5 * track.frame_hop, buf.sample_rate, buf.size());
    out.insert(out.end(), buf.samples.begin() + static_cast<std::ptrdiff_t>(lo),
               buf.samples.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return out;
}

PauseSet detect_pauses(const audio::AudioBuffer& buf, const AcousticConfig& cfg) {
  PauseSet out;
  if (buf.empty() || buf.sample_rate <= 0) return out;
  const double sr = buf.sample_rate;
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.hop * sr)));
  const std::span<const double> x(buf.samples);
  const double peak = simd::max_abs(x);
  const double threshold = cfg.pause_threshold * peak;

  std::size_t run_start = 0;
  bool in_run = false;
  auto close_run = [&](std::size_t end) {
    const double start_s = static_cast<double>(run_start) / sr;
    const double end_s = static_cast<double>(end) / sr;
    if (end_s - start_s >= cfg.min_pause - 1e-9) out.intervals.emplace_back(start_s, end_s);
  };
  for (std::size_t start = 0; start < x.size(); start += hop) {
    const auto frame = x.subspan(start, std::min(hop, x.size() - start));
    const double rms = std::sqrt(simd::sum_squares(frame) / static_cast<double>(frame.size()));
    const bool silent = peak == 0.0 || rms < threshold;
    if (silent && !in_run) {
      run_start = start;
      in_run = true;
    } else if (!silent && in_run) {
      close_run(start);
      in_run = false;
    }
  }
  if (in_run) close_run(x.size());

  for (const auto& [a, b] : out.intervals) {
    const double d = b - a;
    if (d < 1.0) {
      ++out.short_count;
    } else if (d <= 2.0) {
      ++out.medium_count;
    } else {
      ++out.long_count;
    }
    out.total_pause_time += d;
  }
  if (!out.intervals.empty()) out.mean_duration = out.total_pause_time / static_cast<double>(out.intervals.size());
  return out;
}

Rates rates(const audio::AudioBuffer& buf, const PitchTrack& track, const PauseSet& pauses) {
  Rates r;
  const double duration = buf.duration();
  if (duration <= 0.0) return r;
  const auto voiced = static_cast<double>(track.voiced_count());
  r.phonation = voiced / duration;
  const double speaking = duration - pauses.total_pause_time;
  r.articulation = speaking > 0.0 ? voiced / speaking : 0.0;
  return r;
}

double pvi_from_durations(std::span<const double> durations) {
  if (durations.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < durations.size(); ++k) {
    const double avg = 0.5 * (durations[k] + durations[k + 1]);
    if (avg > 0.0) total += std::fabs(durations[k] - durations[k + 1]) / avg;
  }
  return 100.0 * total / static_cast<double>(durations.size() - 1);
}

double pvi(const PitchTrack& track) {
  std::vector<double> durations;
  for (const auto& run : voiced_runs(track)) {
    durations.push_back(static_cast<double>(run.last - run.first + 1) * track.frame_hop);
  }
  return pvi_from_durations(durations);
}

double amplitude_entropy(std::span<const double> samples, int bins) {
  if (samples.empty() || bins <= 0) return 0.0;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : samples) {
    const double a = std::min(1.0, std::fabs(v));
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(bins - 1), static_cast<std::size_t>(a * bins));
    ++counts[b];
  }
  const auto n = static_cast<double>(samples.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double speech_entropy(const audio::AudioBuffer& buf, const PitchTrack& track, int bins) {
  return amplitude_entropy(voiced_samples(buf, track), bins);
}

AcousticFeatures extract_acoustic(const audio::AudioBuffer& input, const AcousticConfig& cfg) {
  const auto normalized = audio::normalize_amplitude(input);
  const auto& buf = normalized.audio;

  AcousticFeatures f;
  f.duration = buf.duration();
  const auto track = detect_pitch(buf, cfg);
  const auto f0 = f0_statistics(track);
  f.F0_mean = f0.mean;
  f.F0_range = f0.range;
  f.F0_var = f0.var;
  f.F0_std = f0.std;
  const auto intensity = intensity_statistics(buf, cfg);
  f.Intensity_mean = intensity.mean;
  f.Intensity_std = intensity.std;
  f.Jitter_local = jitter_local(track);
  f.Shimmer_local = shimmer_local(buf, track);
  f.HNR = hnr(buf, track, cfg);
  f.PVI = pvi(track);
  f.ZCR = zcr(voiced_samples(buf, track));

  const auto pauses = detect_pauses(buf, cfg);
  f.pause_count = pauses.count();
  f.pause_short = pauses.short_count;
  f.pause_medium = pauses.medium_count;
  f.pause_long = pauses.long_count;
  f.pause_mean = pauses.mean_duration;
  f.pause_speech_ratio = f.duration > 0.0 ? std::clamp(pauses.total_pause_time / f.duration, 0.0, 1.0) : 0.0;

  const auto r = rates(buf, track, pauses);
  f.Phonation_rate = r.phonation;
  f.articulation_rate = r.articulation;
  f.speech_entropy = speech_entropy(buf, track, cfg.entropy_bins);
  return f;
}

}  // namespace voicemark::acoustic
