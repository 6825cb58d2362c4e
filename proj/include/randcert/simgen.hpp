#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "randcert/bitstream.hpp"
#include "randcert/extract.hpp"

namespace randcert {

// xoshiro256** 1.0 (Blackman & Vigna), state seeded from a 64-bit value with
// SplitMix64. Output is fully specified, so fixtures are portable.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed);
  static Xoshiro256StarStar from_state(const std::array<std::uint64_t, 4>& state);

  std::uint64_t next();
  // Uniform double in [0, 1) from the top 53 bits.
  double uniform();

 private:
  Xoshiro256StarStar() = default;
  std::array<std::uint64_t, 4> s_{};
};

enum class GeneratorKind { Bernoulli, Markov, Detector };

GeneratorKind parse_generator_kind(std::string_view name);
const char* to_string(GeneratorKind kind);

struct DetectorParams {
  double mean_interarrival = 1.0e6;  // time units between photons (all detectors)
  double dead_time = 0.0;            // detector blind interval after a recorded event
  double afterpulse_prob = 0.0;      // chance a recorded event spawns an after-pulse
  // Delay of the injected after-pulse; unset means dead_time + mean_interarrival / 100.
  std::optional<double> afterpulse_delay;
};

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::Bernoulli;
  double theta = 0.5;      // P(bit = 1), bernoulli
  double stay_prob = 0.5;  // P(bit_k == bit_{k-1}), markov
  DetectorParams detector;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
};

// Throws ConfigError on any out-of-domain parameter.
void validate(const GeneratorConfig& cfg);

BitSequence gen_bernoulli(const GeneratorConfig& cfg);
// First bit fair, then each bit repeats its predecessor with probability stay_prob.
BitSequence gen_markov(const GeneratorConfig& cfg);

struct DetectorOutput {
  TimeTagSeries tags;  // recorded event times, kind = timestamps
  BitSequence bits;    // which detector fired, one bit per recorded event
};

// Two-detector photon counting. Photons arrive as a Poisson process and are
// routed to either detector with probability 1/2. A detector drops any event
// arriving less than dead_time after its own previous recorded event. Every
// recorded event spawns, with probability afterpulse_prob, one extra event on
// the same detector after afterpulse_delay. Runs until n events are recorded.
DetectorOutput gen_detector(const GeneratorConfig& cfg);

}  // namespace randcert
