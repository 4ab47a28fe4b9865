#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "synth.hpp"
#include "topovox/audio_io.hpp"
#include "topovox/error.hpp"

using namespace topovox;

namespace {

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back(v >> 8);
}
void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

// Hand-assembled RIFF/WAVE PCM16 file.
std::vector<std::uint8_t> wav_bytes(const std::vector<std::int16_t>& interleaved, int channels, int rate,
                                    std::size_t data_bytes_override = 0) {
  std::vector<std::uint8_t> b;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put32(b, 36 + data_bytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(b, 16);
  put16(b, 1);
  put16(b, static_cast<std::uint16_t>(channels));
  put32(b, static_cast<std::uint32_t>(rate));
  put32(b, static_cast<std::uint32_t>(rate * channels * 2));
  put16(b, static_cast<std::uint16_t>(channels * 2));
  put16(b, 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put32(b, data_bytes_override ? static_cast<std::uint32_t>(data_bytes_override) : data_bytes);
  for (auto s : interleaved) put16(b, static_cast<std::uint16_t>(s));
  return b;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected topovox::Error";
  return ErrorCode::kIo;
}

std::size_t peak_bin(const std::vector<double>& x, std::size_t n) {
  const auto p = oracle::dft_power(std::span<const double>(x.data(), std::min(n, x.size())), n);
  return static_cast<std::size_t>(std::max_element(p.begin() + 1, p.end()) - p.begin());
}

}  // namespace

TEST(Wav, DecodesFixedPointScaling) {
  const auto rec = decode_wav(wav_bytes({0, 16384, -16384, 32767}, 1, 16000));
  ASSERT_EQ(rec.num_channels(), 1u);
  ASSERT_EQ(rec.num_samples(), 4u);
  EXPECT_EQ(rec.channels[0][0], 0.0);
  EXPECT_EQ(rec.channels[0][1], 0.5);
  EXPECT_EQ(rec.channels[0][2], -0.5);
  EXPECT_EQ(rec.channels[0][3], 32767.0 / 32768.0);
  EXPECT_EQ(rec.sample_rate, 16000.0);
}

TEST(Wav, KeepsStereoChannelsSeparate) {
  const auto rec = decode_wav(wav_bytes({100, -100, 200, -200}, 2, 8000));
  ASSERT_EQ(rec.num_channels(), 2u);
  EXPECT_EQ(rec.channels[0][1], 200.0 / 32768.0);
  EXPECT_EQ(rec.channels[1][1], -200.0 / 32768.0);
  EXPECT_EQ(code_of([&] { (void)rec.samples(); }), ErrorCode::kUnsupportedFormat);
}

TEST(Wav, TruncatedDataChunkIsFormatError) {
  auto bytes = wav_bytes({1, 2, 3, 4}, 1, 16000, 64);
  EXPECT_EQ(code_of([&] { decode_wav(bytes); }), ErrorCode::kFormat);
  bytes.resize(20);
  EXPECT_EQ(code_of([&] { decode_wav(bytes); }), ErrorCode::kFormat);
}

TEST(Wav, EncodeDecodeRoundTrip) {
  const auto rec = synth::make_recording("r", {0.0, 0.25, -0.75, 0.999}, 22050.0);
  const auto back = decode_wav(encode_wav(rec));
  ASSERT_EQ(back.num_samples(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(back.channels[0][i], rec.channels[0][i], 1.0 / 32768.0);
  EXPECT_EQ(back.sample_rate, 22050.0);
}

TEST(Mono, AveragesChannels) {
  Recording r;
  r.sample_rate = 16000;
  r.channels = {{1, 1}, {0, 0}};
  const auto m = to_mono(r);
  ASSERT_EQ(m.num_channels(), 1u);
  EXPECT_EQ(m.channels[0], (std::vector<double>{0.5, 0.5}));
}

TEST(Mono, MonoUnchangedAndThreeChannelsRejected) {
  const auto r = synth::make_recording("a", {0.1, 0.2, 0.3});
  EXPECT_EQ(to_mono(r).channels, r.channels);
  Recording three = r;
  three.channels = {{0}, {0}, {0}};
  EXPECT_EQ(code_of([&] { to_mono(three); }), ErrorCode::kUnsupportedFormat);
}

TEST(Resample, LengthFollowsRateRatio) {
  const auto r = synth::make_recording("a", std::vector<double>(44100, 0.1), 44100.0);
  EXPECT_EQ(resample(r).num_samples(), 16000u);
}

TEST(Resample, SinePeakStaysWithinOneBin) {
  const auto r = synth::make_recording("a", synth::sine(440.0, 1.0, 44100.0), 44100.0);
  const auto out = resample(r);
  EXPECT_EQ(out.sample_rate, 16000.0);
  const std::size_t n = 4096;
  const double expected = 440.0 * n / 16000.0;
  EXPECT_LT(std::abs(static_cast<double>(peak_bin(out.channels[0], n)) - expected), 1.0);
}

TEST(Resample, ConstantStaysConstant) {
  const auto r = synth::make_recording("a", std::vector<double>(4410, 0.3), 44100.0);
  const auto out = resample(r);
  for (std::size_t i = 40; i + 40 < out.num_samples(); ++i) EXPECT_NEAR(out.channels[0][i], 0.3, 1e-6);
}

TEST(Labels, ParsesFileNameConvention) {
  const auto l = parse_labels_from_name("spk03_F_a_normal_2.wav");
  ASSERT_TRUE(l.has_value());
  EXPECT_EQ(l->speaker, "spk03");
  EXPECT_EQ(l->gender, "F");
  EXPECT_EQ(l->vowel, "a");
  EXPECT_EQ(l->condition, "normal");
  EXPECT_FALSE(parse_labels_from_name("notes.wav").has_value());
}

TEST(Manifest, ScanUsesSidecarAndRoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() / "topovox_manifest_test";
  std::filesystem::remove_all(dir);
  std::vector<Recording> recs;
  for (int i = 0; i < 4; ++i)
    recs.push_back(synth::make_recording("r" + std::to_string(i), synth::sine(300 + 50 * i, 0.05), 16000.0,
                                         {i % 2 ? "a" : "i", "s" + std::to_string(i), i < 2 ? "F" : "M",
                                          "loud"}));
  synth::write_corpus(dir, recs);
  const auto m = scan_dataset(dir);
  ASSERT_EQ(m.entries.size(), 4u);
  const auto marg = label_marginals(m);
  EXPECT_EQ(marg.vowel.size(), 2u);
  EXPECT_EQ(marg.gender.at("F"), 2u);
  EXPECT_FALSE(has_full_cardinalities(marg));
  write_manifest_csv(m, dir / "manifest.csv");
  const auto back = read_manifest_csv(dir / "manifest.csv");
  ASSERT_EQ(back.entries.size(), m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].id, m.entries[i].id);
    EXPECT_EQ(back.entries[i].labels, m.entries[i].labels);
  }
  const auto pre = load_preprocessed(m.entries[0].path);
  EXPECT_EQ(pre.sample_rate, kTargetSampleRate);
  std::filesystem::remove_all(dir);
}
