#pragma once

// Run configuration: one JSON file drives every subcommand. Validation
// failures carry the offending field's path so the CLI can report exactly
// what is wrong (exit code 2).

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gnc/degree_distribution.hpp"
#include "gnc/optimizer.hpp"
#include "gnc/params.hpp"
#include "gnc/pipeline.hpp"
#include "gnc/sim.hpp"

namespace gnc {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what) {}
};

// --- JSON forms ---------------------------------------------------------------

inline json degree_distribution_to_json(const DegreeDistribution& dist) {
  json degrees = json::array();
  for (const auto& [degree, prob] : dist.terms()) degrees.push_back({degree, prob});
  return json{{"degrees", degrees}};
}

inline DegreeDistribution degree_distribution_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("degrees") || !j["degrees"].is_array())
    throw ConfigError(field, "expected an object {\"degrees\": [[i, p_i], ...]}");
  std::vector<DegreeDistribution::Term> terms;
  std::uint32_t prev = 0;
  for (std::size_t i = 0; i < j["degrees"].size(); ++i) {
    const auto& entry = j["degrees"][i];
    const std::string at = field + ".degrees[" + std::to_string(i) + "]";
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() ||
        !entry[1].is_number())
      throw ConfigError(at, "expected a [degree, probability] pair");
    const auto degree = entry[0].get<std::uint32_t>();
    if (degree <= prev) throw ConfigError(at, "degrees must be strictly increasing");
    prev = degree;
    terms.emplace_back(degree, entry[1].get<double>());
  }
  try {
    return DegreeDistribution(std::move(terms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

inline json analysis_result_to_json(const AnalysisResult& res) {
  json out{{"feasible", res.feasible}, {"r0", res.r0},      {"x0", res.x0},
           {"margin", res.margin},     {"trajectory", res.trajectory}};
  if (std::isnan(res.epsilon))
    out["epsilon"] = nullptr;
  else
    out["epsilon"] = res.epsilon;
  return out;
}

inline json design_to_json(const OptimizedDesign& design, int g, int D) {
  return json{{"g", g},
              {"D", D},
              {"epsilon", design.epsilon},
              {"R", design.R},
              {"delta", design.delta},
              {"r0", design.r0},
              {"x0", design.x0},
              {"distribution", degree_distribution_to_json(design.dist)}};
}

inline OptimizedDesign design_from_json(const json& j, const std::string& field = "design") {
  for (const char* key : {"epsilon", "R", "delta", "r0", "x0", "distribution"})
    if (!j.contains(key)) throw ConfigError(field + "." + key, "missing");
  OptimizedDesign d;
  d.epsilon = j["epsilon"].get<double>();
  d.R = j["R"].get<double>();
  d.delta = j["delta"].get<double>();
  d.r0 = j["r0"].get<double>();
  d.x0 = j["x0"].get<double>();
  d.dist = degree_distribution_from_json(j["distribution"], field + ".distribution");
  return d;
}

inline json summary_to_json(const SimSummary& s) {
  return json{{"trials", s.trials},
              {"mean_overhead", s.mean_overhead},
              {"std_overhead", s.std_overhead},
              {"success_rate", s.success_rate},
              {"percentiles", json{{"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}}}};
}

// --- run configuration ---------------------------------------------------------

struct RunConfig {
  std::optional<CodeParams> code;
  std::optional<DegreeDistribution> dist;
  PipelineConfig pipeline;
  std::uint64_t seed = 1;

  // simulate
  std::string sim_mode = "gamma";
  std::uint64_t trials = 200;
  std::uint64_t base_seed = 1;
  int threads = 1;

  // analyze: either a numeric r0 or "minimize"; g/R/delta fall back to code.*
  std::optional<double> analysis_r0;
  bool analysis_minimize = false;
  double analysis_grid_step = 1e-4;
  std::optional<int> analysis_g;
  std::optional<double> analysis_R;
  std::optional<double> analysis_delta;

  OptimizerConfig optimizer;

  // encode
  std::uint64_t encode_count = 0;  // 0 = default ceil(1.15 K)
};

namespace detail {

template <typename T>
T require_number(const json& j, const std::string& field, T lo, T hi) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (v < static_cast<double>(lo) || v > static_cast<double>(hi)) {
    std::ostringstream msg;
    msg << "value " << v << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(field, msg.str());
  }
  return j.get<T>();
}

inline GridRange grid_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi") || !j.contains("step"))
    throw ConfigError(field, "expected {\"lo\":, \"hi\":, \"step\":}");
  GridRange r;
  r.lo = j["lo"].get<double>();
  r.hi = j["hi"].get<double>();
  r.step = j["step"].get<double>();
  if (!(r.step > 0.0) || r.hi < r.lo) throw ConfigError(field, "need step > 0 and hi >= lo");
  return r;
}

}  // namespace detail

/// "lo:hi:step" as accepted by the --R-grid / --delta-grid flags.
inline GridRange parse_grid_flag(const std::string& text, const std::string& field) {
  GridRange r;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> sep1 >> r.hi >> sep2 >> r.step) || sep1 != ':' || sep2 != ':' ||
      !(r.step > 0.0) || r.hi < r.lo)
    throw ConfigError(field, "expected lo:hi:step with step > 0 and hi >= lo");
  return r;
}

inline RunConfig parse_config(const json& j) {
  RunConfig cfg;
  if (j.contains("code")) {
    const auto& c = j["code"];
    const auto K = detail::require_number<std::uint32_t>(c.value("K", json(0)), "code.K", 1u, 100000000u);
    const auto payload_len =
        detail::require_number<std::uint32_t>(c.value("payload_len", json(1)), "code.payload_len", 1u, 1u << 20);
    const auto q = detail::require_number<std::uint32_t>(c.value("q", json(2)), "code.q", 2u, 65536u);
    int m = 0;
    switch (q) {
      case 2: m = 1; break;
      case 16: m = 4; break;
      case 256: m = 8; break;
      case 65536: m = 16; break;
      default: throw ConfigError("code.q", "q must be one of 2, 16, 256, 65536");
    }
    const auto delta = detail::require_number<double>(c.value("delta", json(0.0)), "code.delta", 0.0, 0.999);
    const auto R = detail::require_number<double>(c.value("R", json(1.0)), "code.R", 1e-6, 1.0);
    const auto g = detail::require_number<std::uint32_t>(c.value("g", json(1)), "code.g", 1u, 65535u);
    const auto D = detail::require_number<std::uint32_t>(c.value("D", json(2)), "code.D", 2u, 100000u);
    try {
      cfg.code = CodeParams::create(K, payload_len, m, delta, R, g, D);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("code", e.what());
    }
  }
  if (j.contains("distribution"))
    cfg.dist = degree_distribution_from_json(j["distribution"], "distribution");
  if (j.contains("design")) {
    // Convenience: a design JSON produced by `optimize` can be inlined; its
    // distribution is used when no explicit one is given.
    if (!cfg.dist && j["design"].contains("distribution"))
      cfg.dist = degree_distribution_from_json(j["design"]["distribution"], "design.distribution");
  }
  if (j.contains("precode")) {
    const auto& p = j["precode"];
    if (p.contains("dc"))
      cfg.pipeline.precode.dc = detail::require_number<std::uint32_t>(p["dc"], "precode.dc", 0u, 1000000u);
    if (p.contains("elimination_cap"))
      cfg.pipeline.precode.elimination_cap =
          detail::require_number<std::uint32_t>(p["elimination_cap"], "precode.elimination_cap", 0u, 10000000u);
  }
  if (j.contains("handoff_margin"))
    cfg.pipeline.handoff_margin =
        detail::require_number<double>(j["handoff_margin"], "handoff_margin", 0.0, 1.0);
  if (j.contains("seed"))
    cfg.seed = detail::require_number<std::uint64_t>(j["seed"], "seed", 0ull, ~0ull);

  if (j.contains("sim")) {
    const auto& s = j["sim"];
    if (s.contains("mode")) {
      cfg.sim_mode = s["mode"].get<std::string>();
      if (cfg.sim_mode != "gamma" && cfg.sim_mode != "srlnc")
        throw ConfigError("sim.mode", "must be \"gamma\" or \"srlnc\"");
    }
    if (s.contains("trials"))
      cfg.trials = detail::require_number<std::uint64_t>(s["trials"], "sim.trials", 1ull, 10000000ull);
    if (s.contains("base_seed"))
      cfg.base_seed = detail::require_number<std::uint64_t>(s["base_seed"], "sim.base_seed", 0ull, ~0ull);
    if (s.contains("threads"))
      cfg.threads = detail::require_number<int>(s["threads"], "sim.threads", 1, 256);
  }

  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    if (a.contains("r0")) {
      if (a["r0"].is_string()) {
        if (a["r0"].get<std::string>() != "minimize")
          throw ConfigError("analysis.r0", "expected a number or \"minimize\"");
        cfg.analysis_minimize = true;
      } else {
        cfg.analysis_r0 = detail::require_number<double>(a["r0"], "analysis.r0", 0.0, 1e9);
      }
    }
    if (a.contains("grid_step"))
      cfg.analysis_grid_step =
          detail::require_number<double>(a["grid_step"], "analysis.grid_step", 1e-9, 1e-3);
    if (a.contains("g")) cfg.analysis_g = detail::require_number<int>(a["g"], "analysis.g", 1, 1000);
    if (a.contains("R")) cfg.analysis_R = detail::require_number<double>(a["R"], "analysis.R", 1e-6, 1.0);
    if (a.contains("delta"))
      cfg.analysis_delta = detail::require_number<double>(a["delta"], "analysis.delta", 0.0, 0.999);
  }

  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    if (o.contains("g")) cfg.optimizer.g = detail::require_number<int>(o["g"], "optimizer.g", 1, 1000);
    if (o.contains("D")) cfg.optimizer.D = detail::require_number<int>(o["D"], "optimizer.D", 2, 1000);
    if (o.contains("R_grid")) cfg.optimizer.R_grid = detail::grid_from_json(o["R_grid"], "optimizer.R_grid");
    if (o.contains("delta_grid"))
      cfg.optimizer.delta_grid = detail::grid_from_json(o["delta_grid"], "optimizer.delta_grid");
    if (o.contains("x_grid_step"))
      cfg.optimizer.x_grid_step =
          detail::require_number<double>(o["x_grid_step"], "optimizer.x_grid_step", 1e-9, 1e-1);
    if (o.contains("r0_tolerance"))
      cfg.optimizer.r0_tolerance =
          detail::require_number<double>(o["r0_tolerance"], "optimizer.r0_tolerance", 1e-12, 1.0);
    if (o.contains("slack"))
      cfg.optimizer.slack = detail::require_number<double>(o["slack"], "optimizer.slack", 0.0, 1e-3);
  }

  if (j.contains("encode")) {
    const auto& e = j["encode"];
    if (e.contains("count"))
      cfg.encode_count = detail::require_number<std::uint64_t>(e["count"], "encode.count", 1ull, 1ull << 40);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace gnc
