#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "voicemark/audio.hpp"

using namespace voicemark::audio;

namespace {

std::vector<double> sine(double hz, int rate, std::size_t n, double amp = 0.5) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return x;
}

void put_u16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v & 0xff);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

// DFT magnitude at an integer frequency, evaluated directly.
double dft_magnitude(const std::vector<double>& x, int rate, double hz) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * std::polar(1.0, -2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  }
  return std::abs(acc);
}

}  // namespace

TEST_SUITE("audio") {
  TEST_CASE("16-bit mono container bookkeeping") {
    const auto bytes = encode_wav(sine(440, 16000, 16000), 16000);
    const auto buf = decode_wav(bytes);
    CHECK(buf.size() == 16000);
    CHECK(buf.sample_rate == 16000);
    CHECK(buf.duration() == 1.0);
  }

  TEST_CASE("symmetric stereo mixes down to silence") {
    std::vector<double> inter;
    for (int i = 0; i < 800; ++i) {
      inter.push_back(0.5);
      inter.push_back(-0.5);
    }
    for (auto enc : {WavEncoding::Pcm16, WavEncoding::Pcm24, WavEncoding::Pcm32, WavEncoding::Float32}) {
      const auto buf = decode_wav(encode_wav(inter, 8000, 2, enc));
      REQUIRE(buf.size() == 800);
      for (double v : buf.samples) CHECK(v == 0.0);
    }
  }

  TEST_CASE("encodings round-trip within their quantization step") {
    const auto x = sine(330, 22050, 2000, 0.9);
    const std::pair<WavEncoding, double> cases[] = {{WavEncoding::Pcm16, 1.0 / 32767},
                                                    {WavEncoding::Pcm24, 1.0 / 8388607},
                                                    {WavEncoding::Pcm32, 1e-9},
                                                    {WavEncoding::Float32, 1e-7}};
    for (const auto& [enc, step] : cases) {
      const auto buf = decode_wav(encode_wav(x, 22050, 1, enc));
      REQUIRE(buf.size() == x.size());
      for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::fabs(buf.samples[i] - x[i]) <= step);
    }
  }

  TEST_CASE("header errors are reported distinctly") {
    const auto good = encode_wav(sine(100, 8000, 400), 8000);
    auto rifx = good;
    rifx[3] = 'X';
    try {
      decode_wav(rifx);
      FAIL("RIFX accepted");
    } catch (const WavError& e) {
      CHECK(e.kind() == WavError::Kind::MalformedHeader);
    }

    auto alaw = good;
    put_u16(alaw, 20, 6);
    try {
      decode_wav(alaw);
      FAIL("A-law accepted");
    } catch (const WavError& e) {
      CHECK(e.kind() == WavError::Kind::UnsupportedCodec);
    }

    auto truncated = good;
    truncated.resize(good.size() - 101);
    try {
      decode_wav(truncated);
      FAIL("truncated data accepted");
    } catch (const WavError& e) {
      CHECK(e.kind() == WavError::Kind::TruncatedData);
    }

    const std::vector<std::uint8_t> tiny{'R', 'I', 'F', 'F'};
    CHECK_THROWS_AS(decode_wav(tiny), WavError);
  }

  TEST_CASE("resampling") {
    AudioBuffer b{sine(440, 16000, 4000), 16000};
    CHECK(resample(b, 16000).samples == b.samples);

    AudioBuffer hi{sine(440, 32000, 32001), 32000};
    const auto lo = resample(hi, 16000);
    CHECK(lo.sample_rate == 16000);
    CHECK(std::abs(static_cast<long>(lo.size()) - 16000) <= 1);
    CHECK(std::fabs(lo.duration() - hi.duration()) <= 1.0 / 16000);

    const auto once = resample(hi, 16000);
    const auto twice = resample(once, 16000);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::fabs(once.samples[i] - twice.samples[i]) <= 1e-6);
  }

  TEST_CASE("440 Hz survives 48 kHz to 16 kHz") {
    AudioBuffer b{sine(440, 48000, 48000), 48000};
    const auto r = resample(b, 16000);
    double best = -1.0;
    int best_hz = 0;
    for (int hz = 380; hz <= 500; ++hz) {
      const double m = dft_magnitude(r.samples, r.sample_rate, hz);
      if (m > best) {
        best = m;
        best_hz = hz;
      }
    }
    CHECK(std::abs(best_hz - 440) <= 1);
  }

  TEST_CASE("upsampling keeps the band") {
    AudioBuffer b{sine(1000, 8000, 8000), 8000};
    const auto r = resample(b, 22050);
    CHECK(std::abs(static_cast<long>(r.size()) - 22050) <= 1);
    CHECK(dft_magnitude(r.samples, 22050, 1000) > 100.0 * dft_magnitude(r.samples, 22050, 3000));
  }

  TEST_CASE("peak normalization") {
    AudioBuffer half{{0.1, -0.5, 0.25}, 16000};
    const auto n = normalize_amplitude(half);
    CHECK_FALSE(n.silent);
    CHECK(n.audio.samples == std::vector<double>{0.2, -1.0, 0.5});

    AudioBuffer zero{std::vector<double>(100, 0.0), 16000};
    const auto z = normalize_amplitude(zero);
    CHECK(z.silent);
    CHECK(z.audio.samples == zero.samples);

    AudioBuffer unit{{0.3, -1.0, 0.7}, 16000};
    CHECK(normalize_amplitude(unit).audio.samples == unit.samples);
  }

  TEST_CASE("normalization is scale invariant") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.2);
    AudioBuffer x{std::vector<double>(1000), 16000};
    for (auto& v : x.samples) v = g(rng);
    const auto ref = normalize_amplitude(x).audio.samples;
    for (double c : {0.01, 0.5, 3.0, 250.0}) {
      AudioBuffer y = x;
      for (auto& v : y.samples) v *= c;
      const auto got = normalize_amplitude(y).audio.samples;
      for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(std::fabs(got[i] - ref[i]) <= 1e-9);
    }
  }

  TEST_CASE("canonical front end from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "voicemark_audio_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "tone.wav").string();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<double> inter;
    for (int i = 0; i < 44100; ++i) {
      inter.push_back(u(rng));
      inter.push_back(u(rng));
    }
    write_wav(path, AudioBuffer{}, WavEncoding::Pcm16);
    {
      const auto bytes = encode_wav(inter, 44100, 2, WavEncoding::Float32);
      std::FILE* f = std::fopen(path.c_str(), "wb");
      REQUIRE(f != nullptr);
      std::fwrite(bytes.data(), 1, bytes.size(), f);
      std::fclose(f);
    }
    const auto canon = load_canonical(path);
    CHECK(canon.audio.sample_rate == 16000);
    CHECK(std::abs(static_cast<long>(canon.audio.size()) - 16000) <= 1);
    double peak = 0.0;
    for (double v : canon.audio.samples) {
      REQUIRE(std::isfinite(v));
      peak = std::max(peak, std::fabs(v));
    }
    CHECK(peak == 1.0);
    std::filesystem::remove_all(dir);
  }
}
