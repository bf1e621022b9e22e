#include "voicemark/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>

#include "voicemark/simd/kernels.hpp"

namespace voicemark::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct FormatChunk {
  std::uint16_t codec = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const FormatChunk& fmt) {
  if (fmt.codec == kFormatFloat) {
    std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                        (static_cast<std::uint32_t>(p[2]) << 16) |
                        (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &raw, sizeof f);
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 16: {
      const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      std::uint32_t raw = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
  }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

// Windowed-sinc polyphase filter.
constexpr int kTapsPerPhase = 64;
constexpr int kHalfTaps = kTapsPerPhase / 2;
constexpr double kKaiserBeta = 8.0;
constexpr std::int64_t kMaxTabulatedPhases = 4096;

double kaiser(double z) {
  if (std::fabs(z) > 1.0) return 0.0;
  static const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - z * z)) / norm;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Taps for an output sample whose position lies `frac` input samples past
// input index i; tap m multiplies input sample i - (kHalfTaps - 1) + m.
void phase_taps(double frac, double cutoff, std::span<double> taps) {
  double total = 0.0;
  for (int m = 0; m < kTapsPerPhase; ++m) {
    const double u = frac - static_cast<double>(m - (kHalfTaps - 1));
    const double h = cutoff * sinc(cutoff * u) * kaiser(u / kHalfTaps);
    taps[m] = h;
    total += h;
  }
  if (total != 0.0) {
    for (auto& t : taps) t /= total;
  }
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  using K = WavError::Kind;
  if (bytes.size() < 12) throw WavError(K::MalformedHeader, "wav: file shorter than RIFF header");
  if (!tag_is(bytes, 0, "RIFF")) {
    throw WavError(K::MalformedHeader, "wav: missing RIFF magic (only little-endian RIFF is supported)");
  }
  if (!tag_is(bytes, 8, "WAVE")) throw WavError(K::MalformedHeader, "wav: missing WAVE form type");

  FormatChunk fmt;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || body + chunk_size > bytes.size()) {
        throw WavError(K::MalformedHeader, "wav: fmt chunk too short");
      }
      fmt.codec = read_u16(bytes, body);
      fmt.channels = read_u16(bytes, body + 2);
      fmt.sample_rate = read_u32(bytes, body + 4);
      fmt.block_align = read_u16(bytes, body + 12);
      fmt.bits = read_u16(bytes, body + 14);
      if (fmt.codec == kFormatExtensible) {
        if (chunk_size < 40) throw WavError(K::MalformedHeader, "wav: extensible fmt chunk too short");
        fmt.codec = read_u16(bytes, body + 24);
      }
      if (fmt.channels == 0 || fmt.sample_rate == 0) {
        throw WavError(K::MalformedHeader, "wav: zero channels or sample rate");
      }
      const bool pcm_ok = fmt.codec == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
      const bool float_ok = fmt.codec == kFormatFloat && fmt.bits == 32;
      if (!pcm_ok && !float_ok) {
        throw WavError(K::UnsupportedCodec, "wav: unsupported codec " + std::to_string(fmt.codec) +
                                                " with " + std::to_string(fmt.bits) + " bits");
      }
      if (fmt.block_align != fmt.channels * (fmt.bits / 8)) {
        throw WavError(K::MalformedHeader, "wav: block alignment inconsistent with format");
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw WavError(K::MalformedHeader, "wav: data chunk before fmt chunk");
      if (body + chunk_size > bytes.size()) {
        throw WavError(K::TruncatedData, "wav: data chunk declares " + std::to_string(chunk_size) +
                                             " bytes but only " +
                                             std::to_string(bytes.size() - body) + " remain");
      }
      if (chunk_size % fmt.block_align != 0) {
        throw WavError(K::TruncatedData, "wav: data chunk ends inside a frame");
      }
      const std::size_t frames = chunk_size / fmt.block_align;
      const std::size_t width = fmt.bits / 8;
      AudioBuffer out;
      out.sample_rate = static_cast<int>(fmt.sample_rate);
      out.samples.resize(frames);
      const std::uint8_t* p = bytes.data() + body;
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt.channels; ++c) {
          acc += decode_sample(p + (f * fmt.channels + c) * width, fmt);
        }
        out.samples[f] = acc / fmt.channels;
      }
      return out;
    }
    pos = body + chunk_size + (chunk_size & 1U);
  }
  throw WavError(have_fmt ? K::TruncatedData : K::MalformedHeader,
                 have_fmt ? "wav: no data chunk" : "wav: no fmt chunk");
}

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(std::span<const double> interleaved, int sample_rate,
                                     int channels, WavEncoding encoding) {
  const std::uint16_t bits = encoding == WavEncoding::Pcm16 ? 16 : encoding == WavEncoding::Pcm24 ? 24 : 32;
  const std::uint16_t codec = encoding == WavEncoding::Float32 ? kFormatFloat : kFormatPcm;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, codec);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : interleaved) {
    const double v = std::clamp(s, -1.0, 1.0);
    switch (encoding) {
      case WavEncoding::Pcm16: {
        const auto q = static_cast<std::int16_t>(std::lround(std::clamp(v * 32768.0, -32768.0, 32767.0)));
        put_u16(out, static_cast<std::uint16_t>(q));
        break;
      }
      case WavEncoding::Pcm24: {
        const auto q = static_cast<std::int32_t>(std::lround(std::clamp(v * 8388608.0, -8388608.0, 8388607.0)));
        const auto u = static_cast<std::uint32_t>(q);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xFF));
        out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xFF));
        break;
      }
      case WavEncoding::Pcm32: {
        const auto q = static_cast<std::int64_t>(std::llround(v * 2147483648.0));
        put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(
                         std::clamp<std::int64_t>(q, -2147483648LL, 2147483647LL))));
        break;
      }
      case WavEncoding::Float32: {
        const auto f = static_cast<float>(v);
        std::uint32_t raw;
        std::memcpy(&raw, &f, sizeof raw);
        put_u32(out, raw);
        break;
      }
    }
  }
  return out;
}

void write_wav(const std::string& path, const AudioBuffer& buf, WavEncoding encoding) {
  const auto bytes = encode_wav(buf.samples, buf.sample_rate, 1, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  if (buf.sample_rate <= 0) throw std::invalid_argument("resample: source rate must be positive");
  if (buf.sample_rate == target_rate) return buf;

  const std::int64_t g = std::gcd<std::int64_t>(buf.sample_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = buf.sample_rate / g;
  const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
  const double cutoff = std::min(1.0, ratio) * 0.97;

  const auto n_in = static_cast<std::int64_t>(buf.samples.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  std::vector<double> padded(buf.samples.size() + 2 * kTapsPerPhase, 0.0);
  std::copy(buf.samples.begin(), buf.samples.end(), padded.begin() + kTapsPerPhase);

  std::vector<double> table;
  const bool tabulate = up <= kMaxTabulatedPhases;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * kTapsPerPhase));
    for (std::int64_t p = 0; p < up; ++p) {
      phase_taps(static_cast<double>(p) / up, cutoff,
                 std::span<double>(table).subspan(static_cast<std::size_t>(p * kTapsPerPhase), kTapsPerPhase));
    }
  }

  const auto& k = simd::active();
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<std::size_t>(n_out));
  std::vector<double> scratch(kTapsPerPhase);
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t num = n * down;
    const std::int64_t base = num / up;
    const std::int64_t phase = num % up;
    const double* taps;
    if (tabulate) {
      taps = table.data() + phase * kTapsPerPhase;
    } else {
      phase_taps(static_cast<double>(phase) / up, cutoff, scratch);
      taps = scratch.data();
    }
    const double* window = padded.data() + kTapsPerPhase + base - (kHalfTaps - 1);
    out.samples[static_cast<std::size_t>(n)] = k.dot(window, taps, kTapsPerPhase);
  }
  return out;
}

NormalizedAudio normalize_amplitude(const AudioBuffer& buf) {
  const double peak = simd::max_abs(buf.samples);
  if (peak == 0.0 || !std::isfinite(peak)) {
    return {buf, peak == 0.0};
  }
  NormalizedAudio out;
  out.audio.sample_rate = buf.sample_rate;
  out.audio.samples.resize(buf.samples.size());
  if (peak == 1.0) {
    out.audio.samples = buf.samples;
  } else {
    // Division (not multiplication by 1/peak) keeps the peak sample at exactly 1.
    for (std::size_t i = 0; i < buf.samples.size(); ++i) out.audio.samples[i] = buf.samples[i] / peak;
  }
  return out;
}

NormalizedAudio load_canonical(const std::string& path, int target_rate) {
  return normalize_amplitude(resample(read_wav(path), target_rate));
}

}  // namespace voicemark::audio
