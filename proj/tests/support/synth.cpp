#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "topovox/csv.hpp"

namespace synth {

std::vector<double> sine(double freq, double seconds, double rate, double amp, double phase) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate + phase);
  return x;
}

topovox::Recording make_recording(std::string id, std::vector<double> samples, double rate,
                                  topovox::RecordingLabels labels) {
  topovox::Recording r;
  r.id = std::move(id);
  r.sample_rate = rate;
  r.channels = {std::move(samples)};
  r.labels = std::move(labels);
  return r;
}

std::vector<topovox::Recording> tone_corpus(std::size_t per_class, double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(200.0, 4000.0), amp(0.2, 0.8), phase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const char* classes[] = {"tone", "twotone", "noise"};
  std::vector<topovox::Recording> out;
  const auto n = static_cast<std::size_t>(std::llround(seconds * 16000.0));
  for (std::size_t k = 0; k < per_class; ++k) {
    for (int c = 0; c < 3; ++c) {
      std::vector<double> x(n, 0.0);
      if (c == 0) {
        x = sine(freq(rng), seconds, 16000.0, amp(rng), phase(rng));
      } else if (c == 1) {
        const auto a = sine(freq(rng), seconds, 16000.0, 0.5 * amp(rng), phase(rng));
        const auto b = sine(freq(rng), seconds, 16000.0, 0.5 * amp(rng), phase(rng));
        for (std::size_t i = 0; i < n; ++i) x[i] = a[i] + b[i];
      } else {
        const double s = 0.25 * amp(rng);
        for (auto& v : x) v = s * gauss(rng);
      }
      for (auto& v : x) v = std::clamp(v + 1e-3 * gauss(rng), -1.0, 1.0);
      const std::size_t idx = k * 3 + static_cast<std::size_t>(c);
      topovox::RecordingLabels labels{classes[c], "spk" + std::to_string(idx % 4), idx % 2 == 0 ? "female" : "male",
                                      "cond" + std::to_string(idx % 3)};
      out.push_back(make_recording(std::string(classes[c]) + "_" + std::to_string(k), std::move(x), 16000.0, labels));
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<topovox::Recording>& recordings) {
  std::filesystem::create_directories(dir);
  std::ofstream labels(dir / "labels.csv");
  topovox::csv::write_row(labels, {"file", "vowel", "speaker", "gender", "condition"});
  for (const auto& r : recordings) {
    topovox::save_wav(r, dir / (r.id + ".wav"));
    topovox::csv::write_row(labels, {r.id + ".wav", r.labels.vowel, r.labels.speaker, r.labels.gender,
                                     r.labels.condition});
  }
}

}  // namespace synth
