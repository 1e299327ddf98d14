// gnc: Gamma network code toolkit.
//
//   gnc analyze  --config cfg.json            convergence check / minimal r0
//   gnc optimize --config cfg.json            (R, delta, P(x)) design search
//   gnc simulate --config cfg.json --out p    Monte Carlo overhead campaign
//   gnc encode <input>  --config cfg.json --out stream.gnc
//   gnc decode <stream> --config cfg.json --out recovered.bin
//
// Exit codes: 0 success/feasible, 1 infeasible or decode failure, 2 invalid
// configuration or malformed input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gnc/config.hpp"
#include "gnc/stream_format.hpp"

namespace {

using namespace gnc;

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_global(CLI::App* cmd, GlobalOpts& g, bool config_required = true) {
  auto* opt = cmd->add_option("--config", g.config_path, "JSON run configuration");
  if (config_required) opt->required();
  cmd->add_option("--out", g.out_path, "output path (meaning depends on the subcommand)");
  cmd->add_option("--seed", [&g](const CLI::results_t& r) {
    g.seed = std::stoull(r[0]);
    return true;
  }, "override the config seed");
  cmd->add_option("--threads", [&g](const CLI::results_t& r) {
    g.threads = std::stoi(r[0]);
    return true;
  }, "worker threads for simulate/optimize");
}

RunConfig load(const GlobalOpts& g) {
  RunConfig cfg = load_config(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.base_seed = *g.seed;
  }
  if (g.threads) {
    cfg.threads = *g.threads;
    cfg.optimizer.threads = *g.threads;
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

int cmd_analyze(const GlobalOpts& g) {
  RunConfig cfg = load(g);
  if (!cfg.dist) throw ConfigError("distribution", "analyze needs a degree distribution");
  const int ag = cfg.analysis_g ? *cfg.analysis_g : (cfg.code ? static_cast<int>(cfg.code->g) : 0);
  const double aR = cfg.analysis_R ? *cfg.analysis_R : (cfg.code ? cfg.code->R : -1.0);
  const double ad = cfg.analysis_delta ? *cfg.analysis_delta : (cfg.code ? cfg.code->delta : -1.0);
  if (ag <= 0) throw ConfigError("analysis.g", "missing (set analysis.g or code.g)");
  if (aR <= 0.0) throw ConfigError("analysis.R", "missing (set analysis.R or code.R)");
  if (ad < 0.0) throw ConfigError("analysis.delta", "missing (set analysis.delta or code.delta)");

  AnalysisResult res;
  if (cfg.analysis_minimize) {
    auto min = min_r0(*cfg.dist, ag, aR, ad, cfg.analysis_grid_step);
    if (!min) {
      json out{{"feasible", false}, {"epsilon", nullptr}};
      std::cout << out.dump(2) << "\n";
      return 1;
    }
    res = check_convergence(make_asymptotic_params(ag, aR, ad, *cfg.dist, min->r0),
                            cfg.analysis_grid_step);
  } else if (cfg.analysis_r0) {
    res = check_convergence(make_asymptotic_params(ag, aR, ad, *cfg.dist, *cfg.analysis_r0),
                            cfg.analysis_grid_step);
  } else {
    throw ConfigError("analysis.r0", "set a number or \"minimize\"");
  }
  const std::string text = analysis_result_to_json(res).dump(2) + "\n";
  std::cout << text;
  if (!g.out_path.empty()) write_file(g.out_path, text);
  return res.feasible ? 0 : 1;
}

int cmd_optimize(const GlobalOpts& g, const std::string& r_grid_flag,
                 const std::string& delta_grid_flag) {
  RunConfig cfg = load(g);
  if (!r_grid_flag.empty()) cfg.optimizer.R_grid = parse_grid_flag(r_grid_flag, "--R-grid");
  if (!delta_grid_flag.empty())
    cfg.optimizer.delta_grid = parse_grid_flag(delta_grid_flag, "--delta-grid");
  auto design = optimize_design(cfg.optimizer);
  if (!design) {
    std::cout << json{{"feasible", false}}.dump(2) << "\n";
    return 1;
  }
  const std::string text = design_to_json(*design, cfg.optimizer.g, cfg.optimizer.D).dump(2) + "\n";
  std::cout << text;
  if (!g.out_path.empty()) write_file(g.out_path, text);
  return 0;
}

int cmd_simulate(const GlobalOpts& g) {
  RunConfig cfg = load(g);
  if (!cfg.code) throw ConfigError("code", "simulate needs code parameters");
  SimSummary summary;
  if (cfg.sim_mode == "srlnc") {
    summary = run_baseline_srlnc(*cfg.code, cfg.trials, cfg.base_seed, cfg.threads);
  } else {
    if (!cfg.dist) throw ConfigError("distribution", "gamma simulation needs a degree distribution");
    summary = run_campaign(*cfg.code, *cfg.dist, cfg.pipeline, cfg.trials, cfg.base_seed,
                           cfg.threads);
  }
  json out = summary_to_json(summary);
  out["params"] = json{{"K", cfg.code->K},     {"payload_len", cfg.code->payload_len},
                       {"q", cfg.code->q()},   {"delta", cfg.code->delta},
                       {"R", cfg.code->R},     {"g", cfg.code->g},
                       {"D", cfg.code->D},     {"K_prime", cfg.code->K_prime},
                       {"N", cfg.code->N},     {"n", cfg.code->n},
                       {"M", cfg.code->M},     {"mode", cfg.sim_mode},
                       {"trials", cfg.trials}, {"base_seed", cfg.base_seed}};
  const std::string summary_text = out.dump(2) + "\n";
  std::cout << summary_text;
  const std::string prefix = g.out_path.empty() ? "sim_out" : g.out_path;
  write_file(prefix + ".csv", trials_csv(summary));
  write_file(prefix + ".summary.json", summary_text);
  return 0;
}

int cmd_encode(const GlobalOpts& g, const std::string& input_path) {
  RunConfig cfg = load(g);
  if (!cfg.code) throw ConfigError("code", "encode needs code parameters");
  if (!cfg.dist && cfg.code->M > 0)
    throw ConfigError("distribution", "encode needs a degree distribution when M > 0");
  if (g.out_path.empty()) throw ConfigError("--out", "encode needs an output stream path");
  const CodeParams& params = *cfg.code;

  std::ifstream in(input_path, std::ios::binary);
  if (!in) throw ConfigError("input", "cannot open " + input_path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t block_bytes = packed_size(
      static_cast<std::size_t>(params.K) * params.payload_len, params.m);
  if (data.size() > block_bytes) {
    std::ostringstream msg;
    msg << "input is " << data.size() << " bytes but the block holds only " << block_bytes;
    throw ConfigError("input", msg.str());
  }
  data.resize(block_bytes, '\0');
  const auto symbols = unpack_symbols(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()),
      params.m, static_cast<std::size_t>(params.K) * params.payload_len);
  std::vector<SymbolVec> source(params.K);
  for (std::uint32_t i = 0; i < params.K; ++i)
    source[i].assign(symbols.begin() + static_cast<std::size_t>(i) * params.payload_len,
                     symbols.begin() + static_cast<std::size_t>(i + 1) * params.payload_len);

  const DegreeDistribution dist = cfg.dist ? *cfg.dist : DegreeDistribution::single(2);
  GammaEncoder encoder(params, cfg.pipeline, dist, source, cfg.seed);
  const std::uint64_t count =
      cfg.encode_count ? cfg.encode_count
                       : static_cast<std::uint64_t>(std::ceil(1.15 * static_cast<double>(params.K)));

  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + g.out_path);
  StreamHeader header;
  header.m = static_cast<std::uint8_t>(params.m);
  header.g = static_cast<std::uint16_t>(params.g);
  header.n = params.n;
  header.K = params.K;
  header.payload_len = params.payload_len;
  header.seed = cfg.seed;
  StreamWriter writer(out, header);
  for (std::uint64_t i = 0; i < count; ++i) writer.write(encoder.next_packet());
  std::cerr << "wrote " << count << " packets\n";
  return 0;
}

int cmd_decode(const GlobalOpts& g, const std::string& stream_path) {
  RunConfig cfg = load(g);
  if (!cfg.code) throw ConfigError("code", "decode needs code parameters");
  if (!cfg.dist && cfg.code->M > 0)
    throw ConfigError("distribution", "decode needs a degree distribution when M > 0");
  if (g.out_path.empty()) throw ConfigError("--out", "decode needs an output path");
  const CodeParams& params = *cfg.code;

  std::ifstream in(stream_path, std::ios::binary);
  if (!in) throw ConfigError("input", "cannot open " + stream_path);
  StreamReader reader(in);
  const auto& h = reader.header();
  if (h.m != params.m || h.g != params.g || h.n != params.n || h.K != params.K ||
      h.payload_len != params.payload_len)
    throw MalformedStream("stream header does not match the configured code parameters");

  const DegreeDistribution dist = cfg.dist ? *cfg.dist : DegreeDistribution::single(2);
  GammaDecoder decoder(params, cfg.pipeline, dist, h.seed);
  auto report = decoder.decode_stream([&]() { return reader.next(); });

  json rep{{"success", report.success},
           {"packets_used", report.packets_used},
           {"overhead", report.overhead},
           {"generations_decoded", report.generations_decoded},
           {"generations_decoded_by_srlnc_alone", report.generations_decoded_by_srlnc_alone},
           {"released_equations_used", report.released_equations_used},
           {"precode_recovered_count", report.precode_recovered_count}};
  std::cout << rep.dump(2) << "\n";
  if (!report.success) return 1;

  SymbolVec all;
  all.reserve(static_cast<std::size_t>(params.K) * params.payload_len);
  for (const auto& payload : report.source) all.insert(all.end(), payload.begin(), payload.end());
  std::vector<std::uint8_t> bytes;
  pack_symbols(all, params.m, bytes);
  write_file(g.out_path, std::string(bytes.begin(), bytes.end()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gamma network codes: analysis, design, simulation and file codec"};
  app.require_subcommand(1);

  GlobalOpts g_analyze, g_optimize, g_simulate, g_encode, g_decode;
  std::string r_grid_flag, delta_grid_flag, encode_input, decode_input;

  auto* analyze = app.add_subcommand("analyze", "evaluate the convergence condition");
  add_global(analyze, g_analyze);
  auto* optimize = app.add_subcommand("optimize", "search (R, delta, P(x)) for minimum overhead");
  add_global(optimize, g_optimize);
  optimize->add_option("--R-grid", r_grid_flag, "override R grid as lo:hi:step");
  optimize->add_option("--delta-grid", delta_grid_flag, "override delta grid as lo:hi:step");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo reception-overhead campaign");
  add_global(simulate, g_simulate);
  auto* encode = app.add_subcommand("encode", "encode a file into a packet stream");
  encode->add_option("input", encode_input, "input file")->required();
  add_global(encode, g_encode);
  auto* decode = app.add_subcommand("decode", "decode a packet stream back into a file");
  decode->add_option("input", decode_input, "stream file")->required();
  add_global(decode, g_decode);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(g_analyze);
    if (optimize->parsed()) return cmd_optimize(g_optimize, r_grid_flag, delta_grid_flag);
    if (simulate->parsed()) return cmd_simulate(g_simulate);
    if (encode->parsed()) return cmd_encode(g_encode, encode_input);
    if (decode->parsed()) return cmd_decode(g_decode, decode_input);
  } catch (const gnc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gnc::MalformedStream& e) {
    std::cerr << "malformed stream: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
