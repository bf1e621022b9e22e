#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace voicemark::audio {

/// Mono waveform with its sampling rate. Samples are in [-1, 1] once decoded.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
  [[nodiscard]] double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

class WavError : public std::runtime_error {
 public:
  enum class Kind { MalformedHeader, UnsupportedCodec, TruncatedData };
  WavError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Decodes a RIFF/WAVE container (PCM 16/24/32-bit or IEEE float32).
/// Multi-channel audio is down-mixed by the per-frame channel mean.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);
AudioBuffer read_wav(const std::string& path);

enum class WavEncoding { Pcm16, Pcm24, Pcm32, Float32 };

/// Encodes interleaved samples (clipped to [-1, 1]) as a RIFF/WAVE byte stream.
std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved, int sample_rate,
                                     int channels = 1, WavEncoding encoding = WavEncoding::Pcm16);
void write_wav(const std::string& path, const AudioBuffer& buf,
               WavEncoding encoding = WavEncoding::Pcm16);

/// Band-limited resampling with a polyphase Kaiser-windowed sinc
/// (64 taps per phase). Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

struct NormalizedAudio {
  AudioBuffer audio;
  bool silent = false;  // input was all-zero and was returned unchanged
};

/// Peak normalization: every sample divided by max |x|.
NormalizedAudio normalize_amplitude(const AudioBuffer& buf);

/// decode -> resample -> normalize, the canonical front end for feature extraction.
NormalizedAudio load_canonical(const std::string& path, int target_rate = 16000);

}  // namespace voicemark::audio
