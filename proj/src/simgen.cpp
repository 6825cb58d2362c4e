#include "randcert/simgen.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <queue>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

void require_kind(const GeneratorConfig& cfg, GeneratorKind kind) {
  if (cfg.kind != kind) {
    throw ConfigError(std::string("generator config is '") + to_string(cfg.kind) + "', expected '" +
                      to_string(kind) + "'");
  }
}

}  // namespace

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256StarStar Xoshiro256StarStar::from_state(const std::array<std::uint64_t, 4>& state) {
  Xoshiro256StarStar g;
  g.s_ = state;
  return g;
}

std::uint64_t Xoshiro256StarStar::next() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Xoshiro256StarStar::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "bernoulli") return GeneratorKind::Bernoulli;
  if (name == "markov") return GeneratorKind::Markov;
  if (name == "detector") return GeneratorKind::Detector;
  throw ConfigError("unknown generator '" + std::string(name) +
                    "' (expected bernoulli, markov or detector)");
}

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Bernoulli: return "bernoulli";
    case GeneratorKind::Markov: return "markov";
    case GeneratorKind::Detector: return "detector";
  }
  return "?";
}

void validate(const GeneratorConfig& cfg) {
  require_probability(cfg.theta, "theta");
  require_probability(cfg.stay_prob, "stay_prob");
  const auto& d = cfg.detector;
  require_probability(d.afterpulse_prob, "afterpulse_prob");
  if (!(d.afterpulse_prob < 1.0) && cfg.kind == GeneratorKind::Detector) {
    throw ConfigError("afterpulse_prob must be below 1 or the after-pulse chain never ends");
  }
  if (!(d.mean_interarrival > 0.0) || !std::isfinite(d.mean_interarrival)) {
    throw ConfigError("mean_interarrival must be a positive finite number");
  }
  if (!(d.dead_time >= 0.0) || !std::isfinite(d.dead_time)) {
    throw ConfigError("dead_time must be a non-negative finite number");
  }
  if (d.afterpulse_delay && !(*d.afterpulse_delay >= 0.0 && std::isfinite(*d.afterpulse_delay))) {
    throw ConfigError("afterpulse_delay must be a non-negative finite number");
  }
}

BitSequence gen_bernoulli(const GeneratorConfig& cfg) {
  require_kind(cfg, GeneratorKind::Bernoulli);
  validate(cfg);
  Xoshiro256StarStar rng(cfg.seed);
  BitSequenceBuilder builder;
  builder.reserve_bits(cfg.n);
  for (std::uint64_t k = 0; k < cfg.n; ++k) builder.push_bit(rng.uniform() < cfg.theta);
  return std::move(builder).finish();
}

BitSequence gen_markov(const GeneratorConfig& cfg) {
  require_kind(cfg, GeneratorKind::Markov);
  validate(cfg);
  Xoshiro256StarStar rng(cfg.seed);
  BitSequenceBuilder builder;
  builder.reserve_bits(cfg.n);
  if (cfg.n == 0) return std::move(builder).finish();
  int bit = static_cast<int>(rng.next() >> 63);
  builder.push_bit(bit);
  for (std::uint64_t k = 1; k < cfg.n; ++k) {
    if (!(rng.uniform() < cfg.stay_prob)) bit ^= 1;
    builder.push_bit(bit);
  }
  return std::move(builder).finish();
}

DetectorOutput gen_detector(const GeneratorConfig& cfg) {
  require_kind(cfg, GeneratorKind::Detector);
  validate(cfg);
  const auto& p = cfg.detector;
  const double delay = p.afterpulse_delay.value_or(p.dead_time + p.mean_interarrival / 100.0);
  Xoshiro256StarStar rng(cfg.seed);

  struct Event {
    double time;
    int detector;
    bool operator>(const Event& o) const { return time > o.time; }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> afterpulses;
  auto draw_gap = [&] { return -p.mean_interarrival * std::log1p(-rng.uniform()); };

  DetectorOutput out;
  out.tags.kind = TagKind::Timestamps;
  out.tags.values.reserve(cfg.n);
  BitSequenceBuilder bits;
  bits.reserve_bits(cfg.n);

  constexpr double kNever = -std::numeric_limits<double>::infinity();
  std::array<double, 2> last_recorded{kNever, kNever};
  double next_photon = draw_gap();

  while (bits.size() < cfg.n) {
    Event ev;
    if (!afterpulses.empty() && afterpulses.top().time <= next_photon) {
      ev = afterpulses.top();
      afterpulses.pop();
    } else {
      ev.time = next_photon;
      ev.detector = rng.uniform() < 0.5 ? 0 : 1;
      next_photon += draw_gap();
    }
    if (ev.time - last_recorded[ev.detector] < p.dead_time) continue;

    last_recorded[ev.detector] = ev.time;
    out.tags.values.push_back(static_cast<std::uint64_t>(std::llround(ev.time)));
    bits.push_bit(ev.detector);
    if (p.afterpulse_prob > 0.0 && rng.uniform() < p.afterpulse_prob) {
      afterpulses.push({ev.time + delay, ev.detector});
    }
  }
  out.bits = std::move(bits).finish();
  return out;
}

}  // namespace randcert
