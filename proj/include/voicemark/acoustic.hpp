#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "voicemark/audio.hpp"

namespace voicemark::acoustic {

struct AcousticConfig {
  double pitch_floor = 75.0;     // Hz
  double pitch_ceiling = 600.0;  // Hz
  double window = 0.040;         // s, pitch analysis frame
  double hop = 0.010;            // s, shared by pitch and pause framing
  double voicing_threshold = 0.45;
  double octave_cost = 0.01;        // per octave below the ceiling lag
  double silence_threshold = 0.03;  // frame peak relative to global peak
  double octave_jump_cost = 0.35;   // path cost per octave between voiced frames
  double voiced_unvoiced_cost = 0.14;
  int max_candidates = 15;
  double intensity_window = 0.032;  // s
  double pause_threshold = 0.01;    // frame RMS relative to global peak
  double min_pause = 0.2;           // s
  int entropy_bins = 64;
};

/// Frame-wise pitch estimate. f0 is 0 for unvoiced frames.
struct PitchTrack {
  std::vector<double> frame_times;  // s, frame centres
  std::vector<double> f0;           // Hz
  std::vector<bool> voiced;
  double frame_hop = 0.01;
  double window = 0.04;
  double floor = 75.0;
  double ceiling = 600.0;

  [[nodiscard]] std::size_t size() const noexcept { return f0.size(); }
  [[nodiscard]] std::size_t voiced_count() const noexcept;
};

struct PauseSet {
  std::vector<std::pair<double, double>> intervals;  // [start, end) in s
  int short_count = 0;   // < 1 s
  int medium_count = 0;  // 1 s .. 2 s inclusive
  int long_count = 0;    // > 2 s
  double mean_duration = 0.0;
  double total_pause_time = 0.0;

  [[nodiscard]] int count() const noexcept { return static_cast<int>(intervals.size()); }
};

struct F0Stats {
  double mean = 0.0;
  double range = 0.0;
  double var = 0.0;  // population variance, exactly std * std
  double std = 0.0;
};

struct IntensityStats {
  double mean = 0.0;  // dB re 1e-4
  double std = 0.0;
};

struct Rates {
  double phonation = 0.0;    // voiced frames / s
  double articulation = 0.0; // voiced frames / s of non-pause time
};

struct AcousticFeatures {
  double ZCR = 0.0;
  double F0_mean = 0.0;
  double F0_range = 0.0;
  double F0_var = 0.0;
  double F0_std = 0.0;
  double Intensity_mean = 0.0;
  double Intensity_std = 0.0;
  double Jitter_local = 0.0;
  double Shimmer_local = 0.0;
  double HNR = 0.0;
  double PVI = 0.0;
  double duration = 0.0;
  double Phonation_rate = 0.0;
  double pause_count = 0.0;
  double pause_short = 0.0;
  double pause_medium = 0.0;
  double pause_long = 0.0;
  double pause_mean = 0.0;
  double pause_speech_ratio = 0.0;
  double articulation_rate = 0.0;
  double speech_entropy = 0.0;

  /// (name, value) pairs in manifest order.
  [[nodiscard]] std::vector<std::pair<std::string, double>> named() const;
};

PitchTrack detect_pitch(const audio::AudioBuffer& buf, double floor, double ceiling,
                        const AcousticConfig& cfg = {});
PitchTrack detect_pitch(const audio::AudioBuffer& buf, const AcousticConfig& cfg = {});

F0Stats f0_statistics(const PitchTrack& track);

IntensityStats intensity_statistics(const audio::AudioBuffer& buf, const AcousticConfig& cfg = {});

/// Mean |T_i - T_{i+1}| over adjacent periods divided by the mean period.
double jitter_from_periods(std::span<const double> periods);
double jitter_local(const PitchTrack& track);

/// Mean |A_i - A_{i+1}| over adjacent cycles divided by the mean amplitude.
double shimmer_from_amplitudes(std::span<const double> amplitudes);
/// Per-cycle peak amplitudes within each voiced run; one inner vector per run.
std::vector<std::vector<double>> cycle_amplitudes(const audio::AudioBuffer& buf, const PitchTrack& track);
double shimmer_local(const audio::AudioBuffer& buf, const PitchTrack& track);

double hnr(const audio::AudioBuffer& buf, const PitchTrack& track, const AcousticConfig& cfg = {});

/// Sign changes / (N - 1); zeros carry the previous sign.
double zcr(std::span<const double> samples);
inline double zcr(const audio::AudioBuffer& buf) { return zcr(buf.samples); }

/// Samples lying under voiced pitch frames, in time order.
std::vector<double> voiced_samples(const audio::AudioBuffer& buf, const PitchTrack& track);

PauseSet detect_pauses(const audio::AudioBuffer& buf, const AcousticConfig& cfg = {});

Rates rates(const audio::AudioBuffer& buf, const PitchTrack& track, const PauseSet& pauses);

/// Normalized PVI over successive interval durations.
double pvi_from_durations(std::span<const double> durations);
double pvi(const PitchTrack& track);

/// Shannon entropy (bits) of a `bins`-bin histogram of |x| over [0, 1].
double amplitude_entropy(std::span<const double> samples, int bins = 64);
double speech_entropy(const audio::AudioBuffer& buf, const PitchTrack& track, int bins = 64);

/// Peak-normalizes `buf` and computes every acoustic feature.
AcousticFeatures extract_acoustic(const audio::AudioBuffer& buf, const AcousticConfig& cfg = {});

}  // namespace voicemark::acoustic
