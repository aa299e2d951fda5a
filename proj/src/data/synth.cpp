#include "mtad/data/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mtad/error.hpp"

namespace mtad::data {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWheelbase = 2.7;     // m
constexpr double kSteeringRatio = 15.0;

constexpr std::array<double, kChannelCount> kNoiseSd = {0.5, 2.0, 0.05, 0.3, 0.3, 0.005};

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

std::string format_range(std::pair<double, double> r) {
  std::ostringstream os;
  os << r.first << ':' << r.second;
  return os.str();
}

void check_range(std::pair<double, double> r, const std::string& what, bool allow_zero) {
  const bool ok = std::isfinite(r.first) && std::isfinite(r.second) && r.first <= r.second &&
                  (allow_zero ? r.first >= 0.0 : r.first > 0.0);
  if (!ok) throw ConfigError(what + " must be a finite lo:hi range with lo <= hi and lo > 0");
}

// Per-segment template parameters.
struct Plan {
  Symbol label = Symbol::Background;
  std::size_t begin = 0, length = 0;
  double yaw_total = 0.0;  // deg, sin^2 lobe
  double s_amplitude = 0.0;  // deg/s, S-shaped yaw
  double v_start = 0.0, v_mid = 0.0, v_end = 0.0;
};

Plan plan_segment(Symbol label, double v_prev, double cruise, SeededRng& rng) {
  Plan p;
  p.label = label;
  p.v_start = v_prev;
  const double v_cruise = cruise + rng.uniform(-1.0, 1.0);
  p.v_mid = p.v_end = v_cruise;
  switch (label) {
    case Symbol::Background:
      p.v_mid = p.v_end = cruise + rng.uniform(-2.0, 2.0);
      break;
    case Symbol::IntersectionPassing:
      p.v_mid = rng.uniform(8.5, 11.0);
      break;
    case Symbol::LeftTurn:
      p.yaw_total = rng.uniform(85.0, 95.0);
      p.v_mid = rng.uniform(7.2, 9.0);
      break;
    case Symbol::RightTurn:
      p.yaw_total = -rng.uniform(85.0, 95.0);
      p.v_mid = rng.uniform(7.0, 8.5);
      break;
    case Symbol::LeftLaneChange:
      p.s_amplitude = rng.uniform(3.0, 5.0);
      p.v_mid = p.v_end = v_prev;
      break;
    case Symbol::RightLaneChange:
      p.s_amplitude = -rng.uniform(3.0, 5.0);
      p.v_mid = p.v_end = v_prev;
      break;
    case Symbol::CrosswalkPassing:
      p.v_mid = rng.uniform(7.0, 8.0);
      break;
    case Symbol::UTurn:
      p.yaw_total = rng.uniform(175.0, 185.0);
      p.v_mid = rng.uniform(7.0, 7.8);
      break;
    case Symbol::LeftLaneBranch:
      p.yaw_total = rng.uniform(10.0, 20.0);
      p.v_mid = p.v_end = std::max(8.0, v_prev - 1.0);
      break;
    case Symbol::RightLaneBranch:
      p.yaw_total = -rng.uniform(10.0, 20.0);
      p.v_mid = p.v_end = std::max(8.0, v_prev - 1.0);
      break;
    case Symbol::Merge:
      p.s_amplitude = rng.uniform(2.0, 4.0);
      p.v_end = v_prev + rng.uniform(2.0, 4.0);
      p.v_mid = 0.5 * (v_prev + p.v_end);
      break;
    default:
      throw DataError("synth: non-maneuver label");
  }
  return p;
}

void render_segment(const Plan& p, double rate, std::vector<double>& speed, std::vector<double>& yaw) {
  const double d = static_cast<double>(p.length) / rate;
  for (std::size_t i = 0; i < p.length; ++i) {
    const double tau = (static_cast<double>(i) + 0.5) / static_cast<double>(p.length);
    const double v = tau < 0.5 ? p.v_start + (p.v_mid - p.v_start) * smoothstep(2.0 * tau)
                               : p.v_mid + (p.v_end - p.v_mid) * smoothstep(2.0 * tau - 1.0);
    const double s = std::sin(kPi * tau);
    // The sin^2 lobe integrates to yaw_total over the segment.
    const double y = (2.0 * p.yaw_total / d) * s * s + p.s_amplitude * std::sin(2.0 * kPi * tau);
    speed[p.begin + i] = v;
    yaw[p.begin + i] = y;
  }
}

// Road-wheel angle from yaw rate through a kinematic bicycle model.
double steer_from_yaw(double yaw_deg_s, double speed) {
  const double omega = yaw_deg_s * kPi / 180.0;
  return kSteeringRatio * std::atan(omega * kWheelbase / std::max(speed, 1.0)) * 180.0 / kPi;
}

double yaw_from_steer(double steer_deg, double speed) {
  const double wheel = steer_deg / kSteeringRatio * kPi / 180.0;
  return std::max(speed, 0.0) / kWheelbase * std::tan(wheel) * 180.0 / kPi;
}

struct Channels {
  std::vector<double>& steer;
  std::vector<double>& speed;
  std::vector<double>& yaw;
  std::vector<double>& pedal;
  std::vector<double>& brake;
};

void inject(AnomalyKind kind, std::size_t begin, std::size_t length, double rate, Channels ch, SeededRng& rng) {
  switch (kind) {
    case AnomalyKind::BrakeSlam: {
      const double depth = rng.uniform(0.35, 0.6);
      const double peak = rng.uniform(0.7, 1.0);
      for (std::size_t i = 0; i < length; ++i) {
        const double tau = (static_cast<double>(i) + 0.5) / static_cast<double>(length);
        // Abrupt drop, slower recovery.
        const double b = tau < 0.3 ? smoothstep(tau / 0.3) : 1.0 - smoothstep((tau - 0.3) / 0.7);
        const std::size_t k = begin + i;
        ch.speed[k] *= 1.0 - depth * b;
        ch.brake[k] = std::max(ch.brake[k], peak * b);
        ch.pedal[k] *= 1.0 - b;
      }
      break;
    }
    case AnomalyKind::SteerOscillation: {
      const double freq = rng.uniform(0.8, 1.5);
      const double amp = rng.uniform(25.0, 45.0);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < length; ++i) {
        const double tau = (static_cast<double>(i) + 0.5) / static_cast<double>(length);
        const double t = static_cast<double>(i) / rate;
        const double delta = amp * std::sin(kPi * tau) * std::sin(2.0 * kPi * freq * t + phase);
        const std::size_t k = begin + i;
        ch.yaw[k] += yaw_from_steer(ch.steer[k] + delta, ch.speed[k]) - yaw_from_steer(ch.steer[k], ch.speed[k]);
        ch.steer[k] += delta;
      }
      break;
    }
    case AnomalyKind::PedalSpike: {
      const std::size_t spikes = 2 + static_cast<std::size_t>(rng.uniform_index(3));
      for (std::size_t s = 0; s < spikes; ++s) {
        const std::size_t width = std::max<std::size_t>(2, static_cast<std::size_t>(rng.uniform(0.15, 0.3) * rate));
        const std::size_t at = begin + static_cast<std::size_t>(rng.uniform_index(std::max<std::size_t>(1, length - std::min(length, width))));
        const bool on_brake = s % 2 == 1;
        const double height = on_brake ? rng.uniform(0.4, 0.8) : rng.uniform(20.0, 35.0);
        for (std::size_t i = 0; i < width && at + i < begin + length; ++i) {
          const double tri = 1.0 - std::abs(2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(width) - 1.0);
          (on_brake ? ch.brake : ch.pedal)[at + i] += height * tri;
        }
      }
      break;
    }
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw ConfigError("sample_rate_hz must be positive");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration_s must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    const double p = probability[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw ConfigError("prob." + std::string(symbol_name(*symbol_from_index(i))) + " must be a finite value >= 0");
    }
    total += p;
    check_range(duration_s_range[i], "duration." + std::string(symbol_name(*symbol_from_index(i))), false);
  }
  if (!(total > 0.0)) throw ConfigError("maneuver probabilities must not all be zero");
  check_range(cruise_speed, "cruise_speed", false);
  check_range(anomaly_duration, "anomaly_duration", false);
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be >= 0");
  if (!(anomaly_rate >= 0.0) || !std::isfinite(anomaly_rate)) throw ConfigError("anomaly_rate must be >= 0");
}

GeneratorConfig GeneratorConfig::from_kv(const KeyValueConfig& kv) {
  GeneratorConfig c;
  c.sample_rate_hz = kv.get_double("sample_rate_hz", c.sample_rate_hz);
  c.duration_s = kv.get_double("duration_s", c.duration_s);
  c.noise = kv.get_double("noise", c.noise);
  c.anomaly_rate = kv.get_double("anomaly_rate", c.anomaly_rate);
  c.anomaly_duration = kv.get_range("anomaly_duration", c.anomaly_duration);
  c.cruise_speed = kv.get_range("cruise_speed", c.cruise_speed);
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    const std::string name(symbol_name(*symbol_from_index(i)));
    c.probability[i] = kv.get_double("prob." + name, c.probability[i]);
    c.duration_s_range[i] = kv.get_range("duration." + name, c.duration_s_range[i]);
  }
  c.validate();
  return c;
}

void GeneratorConfig::to_kv(KeyValueConfig& kv) const {
  auto num = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  kv.set("sample_rate_hz", num(sample_rate_hz));
  kv.set("duration_s", num(duration_s));
  kv.set("noise", num(noise));
  kv.set("anomaly_rate", num(anomaly_rate));
  kv.set("anomaly_duration", format_range(anomaly_duration));
  kv.set("cruise_speed", format_range(cruise_speed));
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    const std::string name(symbol_name(*symbol_from_index(i)));
    kv.set("prob." + name, num(probability[i]));
    kv.set("duration." + name, format_range(duration_s_range[i]));
  }
}

GeneratorConfig GeneratorConfig::reference_mix() {
  GeneratorConfig c;
  for (std::size_t i = 0; i < kManeuverCount; ++i) c.probability[i] = kReferenceLabelPercent[i] / 100.0;
  return c;
}

Trace synth_trace(const GeneratorConfig& config, SeededRng& rng, std::string id) {
  config.validate();
  const double rate = config.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(config.duration_s * rate));
  Trace trace = Trace::zeros(n, rate, std::move(id));
  auto& steer = trace.channel(Channel::SteerAngle);
  auto& steer_speed = trace.channel(Channel::SteerSpeed);
  auto& speed = trace.channel(Channel::Speed);
  auto& yaw = trace.channel(Channel::Yaw);
  auto& pedal = trace.channel(Channel::PedalAngle);
  auto& brake = trace.channel(Channel::PedalPressure);

  // Choosing labels with weight p / E[duration] makes time shares approach p.
  std::array<double, kManeuverCount> pick{};
  double pick_total = 0.0;
  for (std::size_t i = 0; i < kManeuverCount; ++i) {
    const auto [lo, hi] = config.duration_s_range[i];
    pick[i] = config.probability[i] / (0.5 * (lo + hi));
    pick_total += pick[i];
  }

  const double cruise = rng.uniform(config.cruise_speed.first, config.cruise_speed.second);
  double v_prev = cruise;
  std::size_t pos = 0;
  while (pos < n) {
    double u = rng.uniform() * pick_total;
    std::size_t k = 0;
    while (k + 1 < kManeuverCount && (pick[k] == 0.0 || u >= pick[k])) {
      u -= pick[k];
      ++k;
    }
    while (pick[k] == 0.0 && k > 0) --k;  // rounding can run past the last positive weight
    const auto label = *symbol_from_index(k);
    const auto [lo, hi] = config.duration_s_range[k];
    Plan p = plan_segment(label, v_prev, cruise, rng);
    p.begin = pos;
    p.length = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rng.uniform(lo, hi) * rate)));
    p.length = std::min(p.length, n - pos);
    render_segment(p, rate, speed, yaw);
    std::fill(trace.labels.begin() + static_cast<std::ptrdiff_t>(pos),
              trace.labels.begin() + static_cast<std::ptrdiff_t>(pos + p.length), label);
    v_prev = p.v_end;
    pos += p.length;
  }

  for (std::size_t i = 0; i < n; ++i) {
    steer[i] = steer_from_yaw(yaw[i], speed[i]);
    const double a = (speed[std::min(i + 1, n - 1)] - speed[i > 0 ? i - 1 : 0]) * rate /
                     (i > 0 && i + 1 < n ? 2.0 : 1.0);
    const double release = std::clamp((a + 0.6) / 0.4, 0.0, 1.0);
    pedal[i] = (2.0 + 0.6 * speed[i] + 6.0 * std::max(a, 0.0)) * release;
    brake[i] = std::clamp(-a / 8.0, 0.0, 1.0);
  }

  if (config.anomaly_rate > 0.0) {
    const double per_second = config.anomaly_rate / 60.0;
    double t = rng.exponential(per_second);
    while (true) {
      const auto begin = static_cast<std::size_t>(t * rate);
      const double dur = rng.uniform(config.anomaly_duration.first, config.anomaly_duration.second);
      const auto length = std::max<std::size_t>(1, static_cast<std::size_t>(dur * rate));
      if (begin + length > n) break;
      const auto kind = static_cast<AnomalyKind>(rng.uniform_index(3));
      inject(kind, begin, length, rate, Channels{steer, speed, yaw, pedal, brake}, rng);
      std::fill(trace.anomaly_mask.begin() + static_cast<std::ptrdiff_t>(begin),
                trace.anomaly_mask.begin() + static_cast<std::ptrdiff_t>(begin + length), 1);
      t += dur + rng.exponential(per_second);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    steer_speed[i] = n > 1 ? (steer[std::min(i + 1, n - 1)] - steer[i > 0 ? i - 1 : 0]) * rate /
                                 (i > 0 && i + 1 < n ? 2.0 : 1.0)
                           : 0.0;
  }
  if (config.noise > 0.0) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const double sd = kNoiseSd[c] * config.noise;
      for (auto& v : trace.channels[c]) v += sd * rng.normal();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    speed[i] = std::max(speed[i], 0.0);
    pedal[i] = std::max(pedal[i], 0.0);
    brake[i] = std::clamp(brake[i], 0.0, 1.0);
  }
  return trace;
}

}  // namespace mtad::data
