// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnemech/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gnemech/io.hpp"

namespace gnemech {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double total_welfare(const EquilibriumReport& report) {
  double w = 0.0;
  for (double u : report.utilities) w += u;
  return w;
}

}  // namespace

RunSummary summarize(const Scenario& scenario, const EquilibriumReport& report,
                     const std::vector<PropertyReport>& properties) {
  RunSummary s;
  s.welfare = total_welfare(report);
  s.max_deviation_gain = report.max_deviation_gain;
  s.iterations = report.iterations;
  s.variant = scenario.variant();
  s.budget_residual = std::numeric_limits<double>::infinity();
  for (const auto& p : properties) {
    if (p.property == Property::kBudgetBalance) s.budget_residual = p.residual;
    if (p.property == Property::kStrongImplementation && p.applicable) {
      s.implementation_gap = p.residual;
    }
  }
  return s;
}

std::string player_csv(const Scenario& scenario, const EquilibriumReport& report) {
  std::ostringstream out;
  out << "player_id,alpha,eta,tax,utility\n";
  for (PlayerId k = 0; k <= scenario.num_platforms(); ++k) {
    out << k << ',';
    if (report.outcome) {
      const auto& o = *report.outcome;
      out << format_number(o.allocation[k]) << ',';
      if (k != kGovernment) out << format_number(o.min_trust[k]);
      out << ',' << format_number(o.taxes[k]);
    } else {
      out << ",,";
    }
    out << ',' << format_number(report.utilities[k]) << '\n';
  }
  return out.str();
}

std::string summary_csv(const RunSummary& s) {
  std::ostringstream out;
  out << "welfare,budget_residual,implementation_gap,max_deviation_gain,iterations,variant\n";
  out << format_number(s.welfare) << ',' << format_number(s.budget_residual) << ',';
  if (s.implementation_gap) out << format_number(*s.implementation_gap);
  out << ',' << format_number(s.max_deviation_gain) << ',' << s.iterations << ','
      << to_string(s.variant) << '\n';
  return out.str();
}

std::string property_csv(const std::vector<PropertyReport>& properties) {
  std::ostringstream out;
  out << "property,applicable,residual,tolerance,passed,note\n";
  for (const auto& p : properties) {
    out << to_string(p.property) << ',' << (p.applicable ? 1 : 0) << ','
        << format_number(p.residual) << ',' << format_number(p.tolerance) << ','
        << (p.passed ? 1 : 0) << ',' << csv_field(p.note) << '\n';
  }
  return out.str();
}

std::string solution_csv(const CentralizedSolution& sol) {
  std::ostringstream out;
  out << "player_id,action,upper_multiplier,lower_multiplier\n";
  for (std::size_t k = 0; k < sol.actions.size(); ++k) {
    out << k << ',' << format_number(sol.actions[k]) << ','
        << format_number(sol.upper_multipliers[k]) << ','
        << format_number(sol.lower_multipliers[k]) << '\n';
  }
  out << "\nwelfare,trust_multiplier,kkt_residual,outer_iterations\n";
  out << format_number(sol.welfare) << ',' << format_number(sol.trust_multiplier) << ','
      << format_number(sol.kkt_residual) << ',' << sol.outer_iterations << '\n';
  return out.str();
}

void write_report(const Scenario& scenario, const EquilibriumReport& report,
                  const std::vector<PropertyReport>& properties, const std::string& path) {
  save_text(path, player_csv(scenario, report));
  save_text(path + ".summary.csv", summary_csv(summarize(scenario, report, properties)));
  save_text(path + ".properties.csv", property_csv(properties));
}

std::string sweep_csv(std::vector<SweepRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.seed < b.seed; });
  std::ostringstream out;
  out << "seed,platforms,welfare,budget_residual,feasibility_residual,price_residual,"
         "implementation_gap,rationality_residual,max_deviation_gain,pareto_passed,passed,"
         "error\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.platforms << ',' << format_number(r.welfare) << ','
        << format_number(r.budget_residual) << ',' << format_number(r.feasibility_residual)
        << ',' << format_number(r.price_residual) << ',' << format_number(r.implementation_gap)
        << ',' << format_number(r.rationality_residual) << ','
        << format_number(r.max_deviation_gain) << ',' << (r.pareto_passed ? 1 : 0) << ','
        << (r.passed ? 1 : 0) << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

}  // namespace gnemech
