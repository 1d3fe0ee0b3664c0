// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gnemech/errors.hpp"
#include "gnemech/fixtures.hpp"

namespace gnemech {

using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IOError(std::string("malformed JSON: ") + e.what());
  }
}

bool has_zero_weight(const ScenarioSpec& spec) {
  for (const auto& p : spec.platforms) {
    for (const auto& cw : p.valuation.cross_weights) {
      if (cw.weight == 0.0) return true;
    }
  }
  return false;
}

ScenarioSpec spec_from_json(const json& j) {
  ScenarioSpec spec;
  spec.variant = parse_variant(j.value("variant", "standard"));
  for (const auto& jp : j.at("platforms")) {
    PlatformSpec p;
    p.id = jp.at("id").get<PlayerId>();
    p.users = jp.at("users").get<std::int64_t>();
    p.competitors = jp.at("competitors").get<std::vector<PlayerId>>();
    const auto& v = jp.at("valuation");
    p.valuation.family = parse_valuation_family(v.value("family", "log_linear_quadratic"));
    for (const auto& cw : v.at("cross_weights")) {
      p.valuation.cross_weights.push_back({cw.at("id").get<PlayerId>(), cw.at("weight").get<double>()});
    }
    p.valuation.own_linear_cost = v.at("own_linear_cost").get<double>();
    p.valuation.own_quadratic_cost = v.at("own_quadratic_cost").get<double>();
    const auto& t = jp.at("trust");
    p.trust.family = parse_trust_family(t.value("family", "power"));
    p.trust.exponent = t.at("exponent").get<double>();
    spec.platforms.push_back(std::move(p));
  }
  const auto& g = j.at("government");
  spec.government.budget = g.at("budget").get<double>();
  const auto& gv = g.at("valuation");
  const std::string family = gv.value("family", "log");
  if (family != "log") throw ParameterError("unknown government valuation family '" + family + "'");
  spec.government.weight = gv.at("weight").get<double>();
  spec.government.rho = gv.value("rho", 1.0);
  return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const json j = parse_json(text);
  ScenarioSpec spec;
  ValidationOptions options;
  try {
    spec = spec_from_json(j);
    options.allow_zero_weights = j.value("allow_zero_weights", false);
  } catch (const json::exception& e) {
    throw IOError(std::string("bad scenario file: ") + e.what());
  }
  return validate_scenario(std::move(spec), options);
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_text(path)); }

Scenario resolve_scenario(const std::string& name_or_path) {
  const auto names = fixtures::builtin_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return fixtures::builtin(name_or_path);
  }
  return load_scenario(name_or_path);
}

std::string scenario_to_json(const Scenario& scenario) {
  const auto& spec = scenario.spec();
  json j;
  j["variant"] = to_string(spec.variant);
  if (has_zero_weight(spec)) j["allow_zero_weights"] = true;
  json platforms = json::array();
  for (const auto& p : spec.platforms) {
    json weights = json::array();
    for (const auto& cw : p.valuation.cross_weights) {
      weights.push_back({{"id", cw.id}, {"weight", cw.weight}});
    }
    platforms.push_back({
        {"id", p.id},
        {"users", p.users},
        {"competitors", p.competitors},
        {"valuation",
         {{"family", to_string(p.valuation.family)},
          {"cross_weights", weights},
          {"own_linear_cost", p.valuation.own_linear_cost},
          {"own_quadratic_cost", p.valuation.own_quadratic_cost}}},
        {"trust", {{"family", to_string(p.trust.family)}, {"exponent", p.trust.exponent}}},
    });
  }
  j["platforms"] = platforms;
  j["government"] = {{"budget", spec.government.budget},
                     {"valuation",
                      {{"family", "log"},
                       {"weight", spec.government.weight},
                       {"rho", spec.government.rho}}}};
  return j.dump(2) + "\n";
}

Scenario with_variant(const Scenario& scenario, Variant variant) {
  ScenarioSpec spec = scenario.spec();
  spec.variant = variant;
  ValidationOptions options;
  options.allow_zero_weights = has_zero_weight(spec);
  return validate_scenario(std::move(spec), options);
}

MessageProfile parse_profile(const std::string& text, const Scenario& scenario) {
  const json j = parse_json(text);
  MessageProfile m = zero_profile(scenario);
  const int players = scenario.num_players();
  try {
    const auto& g = j.at("government");
    m.government.price = g.value("price", 0.0);
    m.government.lower_bound = g.value("lower_bound", 0.0);
    for (const auto& jp : j.at("platforms")) {
      const PlayerId id = jp.at("id").get<PlayerId>();
      if (id < 1 || id > scenario.num_platforms()) {
        throw IOError("profile names unknown platform " + std::to_string(id));
      }
      auto& pm = m.platform(id);
      pm.min_trust = jp.value("min_trust", 0.0);
      auto read_map = [&](const char* key, std::vector<double>& dst) {
        if (!jp.contains(key)) return;
        for (const auto& [k, v] : jp.at(key).items()) {
          std::size_t used = 0;
          int l = -1;
          try {
            l = std::stoi(k, &used);
          } catch (const std::exception&) {
          }
          if (used != k.size() || l < 0 || l >= players) {
            throw IOError(std::string("bad player key '") + k + "' in " + key);
          }
          dst[l] = v.get<double>();
        }
      };
      read_map("prices", pm.prices);
      read_map("filters", pm.filters);
    }
  } catch (const json::exception& e) {
    throw IOError(std::string("bad profile file: ") + e.what());
  }
  validate_profile(m, scenario);
  return m;
}

MessageProfile load_profile(const std::string& path, const Scenario& scenario) {
  return parse_profile(read_text(path), scenario);
}

std::string profile_to_json(const MessageProfile& profile, const Scenario& scenario) {
  json j;
  j["government"] = {{"price", profile.government.price},
                     {"lower_bound", profile.government.lower_bound}};
  json platforms = json::array();
  for (PlayerId i = 1; i <= scenario.num_platforms(); ++i) {
    const auto& pm = profile.platform(i);
    json prices = json::object(), filters = json::object();
    for (PlayerId l : price_keys(scenario, i)) prices[std::to_string(l)] = pm.prices[l];
    for (PlayerId l : filter_keys(scenario, i)) filters[std::to_string(l)] = pm.filters[l];
    platforms.push_back(
        {{"id", i}, {"min_trust", pm.min_trust}, {"prices", prices}, {"filters", filters}});
  }
  j["platforms"] = platforms;
  return j.dump(2) + "\n";
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IOError("write failed for '" + path + "'");
}

}  // namespace gnemech
