#pragma once

#include <random>
#include <string>
#include <vector>

#include "coopadapt/dynamics.hpp"

namespace coopadapt::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(COOPADAPT_SCENARIO_DIR) + "/" + name + ".json";
}

/// Physically consistent body: mass, center of mass inside a disc, positive rotational inertia about the center.
inline BodyParams random_body(std::mt19937& rng, double reach) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = 0.2 + 2.0 * u(rng);
  const double cx = reach * (2.0 * u(rng) - 1.0);
  const double cy = 0.3 * reach * (2.0 * u(rng) - 1.0);
  const double icm = m * (0.01 + 0.2 * u(rng));
  return {m, m * cx, m * cy, icm + m * (cx * cx + cy * cy)};
}

/// Random chain with 2..4 links, random gravity, payload and mount.
inline PlanarModel random_model(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 2 + static_cast<int>(rng() % 3);
  std::vector<double> lengths, offsets;
  std::vector<BodyParams> links;
  for (int i = 0; i < n; ++i) {
    lengths.push_back(0.3 + u(rng));
    offsets.push_back(0.5 * (2.0 * u(rng) - 1.0));
    links.push_back(random_body(rng, lengths.back()));
  }
  const Vec2 gravity(2.0 * u(rng) - 1.0, -9.81 * u(rng));
  PayloadMount mount{Vec2(0.5 * u(rng), 0.2 * (2.0 * u(rng) - 1.0)), 2.0 * u(rng) - 1.0};
  return PlanarModel(lengths, offsets, links, gravity, random_body(rng, 0.2), mount);
}

inline Vec random_vec(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline std::vector<int> all_bodies(const PlanarModel& model) {
  std::vector<int> b;
  for (int i = 0; i < model.n_bodies(); ++i) b.push_back(i);
  return b;
}

}  // namespace coopadapt::testing
