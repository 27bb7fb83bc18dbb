#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapcs/errors.hpp"
#include "gapcs/theory.hpp"

namespace gapcs {

inline void write_reports_text(std::ostream& out,
                               const std::vector<TheoryReport>& reports,
                               const std::string& delta_source) {
  for (const auto& r : reports) {
    out << "theorem: " << to_string(r.theorem) << '\n'
        << "  delta: " << r.inputs.delta << " (" << delta_source << ")\n"
        << "  m_star: " << r.inputs.m_star << "  k: " << r.inputs.k << '\n'
        << "  e_max: " << r.inputs.e_max << "  e_min: " << r.inputs.e_min
        << '\n'
        << "  alpha: " << r.inputs.alpha << '\n'
        << "  delta_bound: " << delta_bound(r.theorem, r.inputs.m_star,
                                            r.inputs.e_max)
        << "  delta_ok: " << (r.delta_ok ? "yes" : "no") << '\n'
        << "  e_max_bound: " << e_max_bound(r.theorem, r.inputs.m_star)
        << "  e_max_ok: " << (r.e_max_ok ? "yes" : "no") << '\n';
    if (r.interval) {
      out << "  alpha_interval: (" << r.interval->lo << ", " << r.interval->hi
          << ")  alpha_ok: " << (r.alpha_ok ? "yes" : "no") << '\n';
    } else {
      out << "  alpha_interval: infeasible\n";
    }
    out << "  gamma: " << r.gamma << "  gamma_star: " << r.gamma_star
        << "  alpha_star: " << r.alpha_star << '\n';
    if (r.theorem == TheoremId::GapNoisy || r.theorem == TheoremId::AitNoisyA ||
        r.theorem == TheoremId::AitNoisyB) {
      out << "  error_bound: " << r.error_bound;
      if (r.floor_unreliable) out << "  (floor unreliable: e_min << e_max)";
      out << '\n';
    }
    out << "  hypotheses_hold: " << (r.hypotheses_hold ? "yes" : "no") << '\n';
  }
}

inline void write_reports_json(const std::filesystem::path& path,
                               const std::vector<TheoryReport>& reports,
                               const std::string& delta_source) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["theorem"] = to_string(r.theorem);
    j["delta"] = r.inputs.delta;
    j["delta_source"] = delta_source;
    j["m_star"] = r.inputs.m_star;
    j["k"] = r.inputs.k;
    j["e_max"] = r.inputs.e_max;
    j["e_min"] = r.inputs.e_min;
    j["alpha"] = r.inputs.alpha;
    j["noise_norm_sq"] = r.inputs.noise_norm_sq;
    j["delta_bound"] = delta_bound(r.theorem, r.inputs.m_star, r.inputs.e_max);
    j["delta_ok"] = r.delta_ok;
    j["e_max_bound"] = e_max_bound(r.theorem, r.inputs.m_star);
    j["e_max_ok"] = r.e_max_ok;
    if (r.interval) {
      j["alpha_interval"] = {r.interval->lo, r.interval->hi};
    } else {
      j["alpha_interval"] = nullptr;
    }
    j["alpha_ok"] = r.alpha_ok;
    j["gamma"] = std::isfinite(r.gamma) ? nlohmann::json(r.gamma)
                                        : nlohmann::json(nullptr);
    j["gamma_star"] = std::isfinite(r.gamma_star)
                          ? nlohmann::json(r.gamma_star)
                          : nlohmann::json(nullptr);
    j["alpha_star"] = std::isfinite(r.alpha_star)
                          ? nlohmann::json(r.alpha_star)
                          : nlohmann::json(nullptr);
    j["error_bound"] = std::isfinite(r.error_bound)
                           ? nlohmann::json(r.error_bound)
                           : nlohmann::json(nullptr);
    j["floor_unreliable"] = r.floor_unreliable;
    j["hypotheses_hold"] = r.hypotheses_hold;
    doc.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace gapcs
