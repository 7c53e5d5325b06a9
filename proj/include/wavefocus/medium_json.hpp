#pragma once

#include <string>

#include <json.hpp>

#include "wavefocus/medium.hpp"

namespace wavefocus {

inline nlohmann::json profile_to_json(const MediumProfile& p) {
  nlohmann::json j;
  j["x_max"] = p.x_max();
  j["n_cells"] = p.n_cells();
  j["bounds"] = {{"c0", p.bounds().c0},
                 {"c1", p.bounds().c1},
                 {"l0", p.bounds().l0},
                 {"l1", p.bounds().l1}};
  if (p.is_sampled()) {
    j["kind"] = "samples";
    j["c"] = p.cell_samples();
  } else {
    j["kind"] = "bumps";
    auto arr = nlohmann::json::array();
    for (const auto& b : p.bumps())
      arr.push_back({{"center", b.center}, {"width", b.half_width}, {"amplitude", b.amplitude}});
    j["bumps"] = arr;
  }
  return j;
}

inline MediumProfile profile_from_json(const nlohmann::json& j) {
  SpeedBounds bounds;
  if (j.contains("bounds")) {
    bounds.c0 = j["bounds"].value("c0", bounds.c0);
    bounds.c1 = j["bounds"].value("c1", bounds.c1);
    bounds.l0 = j["bounds"].value("l0", bounds.l0);
    bounds.l1 = j["bounds"].value("l1", bounds.l1);
  }
  const double x_max = j.at("x_max").get<double>();
  const std::string kind = j.value("kind", "bumps");
  if (kind == "samples")
    return MediumProfile(x_max, j.at("c").get<std::vector<double>>(), bounds);
  if (kind != "bumps")
    throw std::invalid_argument("profile_from_json: kind must be 'bumps' or 'samples'");
  std::vector<SpeedBump> bumps;
  for (const auto& bj : j.value("bumps", nlohmann::json::array()))
    bumps.push_back(SpeedBump{bj.at("center").get<double>(), bj.at("width").get<double>(),
                              bj.at("amplitude").get<double>()});
  return MediumProfile(x_max, j.at("n_cells").get<int>(), std::move(bumps), bounds);
}

}  // namespace wavefocus
