#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topovox/audio_io.hpp"

namespace synth {

std::vector<double> sine(double freq, double seconds, double rate = 16000.0, double amp = 0.5, double phase = 0.0);

topovox::Recording make_recording(std::string id, std::vector<double> samples, double rate = 16000.0,
                                  topovox::RecordingLabels labels = {});

/// Three classes ("tone", "twotone", "noise") with random frequencies and
/// amplitudes over a faint noise floor. Speakers, genders and conditions are
/// assigned round-robin so every problem has several classes.
std::vector<topovox::Recording> tone_corpus(std::size_t per_class, double seconds, std::uint64_t seed);

/// Writes every recording as <id>.wav plus a labels.csv sidecar.
void write_corpus(const std::filesystem::path& dir, const std::vector<topovox::Recording>& recordings);

}  // namespace synth
