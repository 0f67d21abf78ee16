// Command line front end: cut-set and bound calculators, candidate noise
// set construction, polar code benchmarking, and the end-to-end simulator.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qmfnet/bounds.hpp"
#include "qmfnet/inner_code.hpp"
#include "qmfnet/network.hpp"
#include "qmfnet/pipeline.hpp"
#include "qmfnet/polar.hpp"
#include "qmfnet/quantize.hpp"
#include "qmfnet/rng.hpp"

namespace {

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_flag,
                           std::uint64_t fallback) {
  if (seed_opt->count() > 0) return seed_flag;
  if (const char* env = std::getenv("QMFNET_SEED")) return std::strtoull(env, nullptr, 10);
  return fallback;
}

std::string cut_names(const qmf::LayeredNetwork& net, const std::vector<int>& cut) {
  std::string s = "{";
  for (std::size_t i = 0; i < cut.size(); ++i) {
    if (i) s += ",";
    s += net.name(cut[i]);
  }
  return s + "}";
}

int cmd_bounds_cutset(const std::string& network_path, const std::string& json_path) {
  const qmf::LayeredNetwork net = qmf::load_network_file(network_path);
  const qmf::CutSetReport report = qmf::cutset_iid(net);

  std::cout << "cut                          bits\n";
  for (const auto& cv : report.per_cut)
    std::cout << std::left << std::setw(28) << cut_names(net, cv.cut) << std::fixed
              << std::setprecision(6) << cv.bits << '\n';
  std::cout << "c_iid       " << std::fixed << std::setprecision(6) << report.c_iid << '\n';
  std::cout << "c_bar_upper " << report.c_bar_upper << "  (c_iid + 2|N|, |N|=" << net.size()
            << ")\n";

  if (!json_path.empty()) {
    nlohmann::json j;
    j["c_iid"] = report.c_iid;
    j["c_bar_upper"] = report.c_bar_upper;
    j["per_cut"] = nlohmann::json::array();
    for (const auto& cv : report.per_cut) {
      nlohmann::json row;
      row["bits"] = cv.bits;
      row["cut"] = nlohmann::json::array();
      for (int v : cv.cut) row["cut"].push_back(net.name(v));
      j["per_cut"].push_back(row);
    }
    if (json_path == "-") {
      std::cout << j.dump(2) << '\n';
    } else {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) throw qmf::IoError("cannot write " + json_path);
      out << j.dump(2) << '\n';
    }
  }
  return 0;
}

int cmd_bounds_all(const std::string& network_path, std::uint64_t chunks) {
  const qmf::LayeredNetwork net = qmf::load_network_file(network_path);
  const qmf::CutSetReport report = qmf::cutset_iid(net);
  const qmf::SchemeParams p = qmf::select_params(std::max(report.c_bar_upper, 1.0), net.size());

  std::cout << std::fixed << std::setprecision(6);
  std::cout << "c_iid=" << report.c_iid << " c_bar_upper=" << report.c_bar_upper
            << " |N|=" << net.size() << "\n";
  std::cout << "ell=" << p.ell << " r_i=" << p.r_i << " p_i_bound=" << p.p_i_bound
            << " r_o=" << p.r_o << " overall_rate=" << p.overall_rate
            << " feasible=" << (p.feasible ? "yes" : "no")
            << " h_check=" << (p.h_check_ok ? "ok" : "FAILED") << "\n";

  const double pw = qmf::p_omega_log2_bound(p.c_bar, net.size(), p.ell);
  std::cout << "log2 P_Omega_ab <= " << pw << (pw >= 0 ? "  (vacuous)" : "") << "\n";
  const double ind = qmf::indistinguishability_log2_bound(p);
  std::cout << "log2 P(u->u')   <= " << ind << (ind >= 0 ? "  (vacuous)" : "") << "\n";

  try {
    const qmf::InnerErrorBudget b = qmf::inner_error_budget(p.ell, net.size());
    std::cout << "inner error budget: clip=" << b.clip << " construction=" << b.construction
              << " outside_q=" << b.outside_q << " confusion=" << b.confusion
              << " total=" << b.total << "\n";
  } catch (const qmf::BlockLengthTooSmall&) {
    std::cout << "inner error budget: unavailable (ell <= log2 |N|)\n";
  }

  if (p.p_i_bound > 0.0 && p.p_i_bound < 0.5) {
    std::cout << "chernoff(K=" << chunks << ", q=p_i_bound) = "
              << qmf::chernoff_bound(chunks, p.p_i_bound) << "\n";
  }

  // Per-layer indistinguishability bounds for the minimizing cut, with the
  // lemma applied to x - x' ~ CN(0, 2).
  const auto min_cut = std::min_element(
      report.per_cut.begin(), report.per_cut.end(),
      [](const auto& a, const auto& b) { return a.bits < b.bits; });
  std::vector<char> in_cut(net.size(), 0);
  for (int v : min_cut->cut) in_cut[v] = 1;
  for (int layer = 2; layer <= net.layers(); ++layer) {
    std::vector<int> tx, rx;
    for (int v : net.nodes_at_layer(layer - 1))
      if (in_cut[v]) tx.push_back(v);
    for (int v : net.nodes_at_layer(layer))
      if (!in_cut[v]) rx.push_back(v);
    if (tx.empty() || rx.empty()) continue;
    // Singular values of the transfer matrix via its Gram spectrum.
    std::vector<double> sv;
    {
      Eigen::MatrixXcd h(rx.size(), tx.size());
      for (std::size_t i = 0; i < rx.size(); ++i)
        for (std::size_t j = 0; j < tx.size(); ++j) h(i, j) = net.gain(tx[j], rx[i]);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        sv.push_back(svd.singularValues()(i));
    }
    const double lb =
        qmf::containment_log2_bound(sv, static_cast<int>(rx.size()), 2.0, p.ell);
    std::cout << "min-cut layer " << layer - 1 << "->" << layer
              << ": log2 lemma bound <= " << lb << (lb >= 0 ? "  (vacuous)" : "") << "\n";
  }
  return 0;
}

int cmd_noise_set(std::size_t ell, double sigma, bool sampled, std::uint64_t seed,
                  const std::string& out_path) {
  qmf::NoiseSetBundle bundle = [&] {
    if (sampled) {
      qmf::GaussianStream stream(qmf::derive_seed(seed, "zl-sample"));
      return qmf::NoiseSetBundle::build_sampled(ell, sigma, stream);
    }
    return qmf::NoiseSetBundle::build_exact(ell, sigma);
  }();

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw qmf::IoError("cannot write " + out_path);
    out = &file;
  }

  std::vector<qmf::GaussianIntTuple> sorted = bundle.z_tuples();
  std::sort(sorted.begin(), sorted.end());
  *out << "# ell " << bundle.ell() << "\n";
  *out << "# sigma " << std::setprecision(17) << bundle.sigma() << "\n";
  *out << "# log2_threshold " << bundle.log2_threshold() << "\n";
  *out << "# construction "
       << (bundle.construction() == qmf::ZlConstruction::deterministic ? "exact" : "sampled")
       << "\n";
  *out << "# samples " << bundle.sample_count() << "\n";
  *out << "# count " << bundle.z_size() << "\n";
  for (const auto& t : sorted) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const qmf::GaussianInt g = t.at(i);
      *out << (i ? " " : "") << g.re << ' ' << g.im;
    }
    *out << '\n';
  }
  return 0;
}

int cmd_polar_bench(std::size_t n, double p, double rate, std::uint64_t frames,
                    std::uint64_t seed, const std::string& out_path) {
  const qmf::PolarCode code = qmf::construct_polar(n, p, rate);
  qmf::SplitMix64 msg_stream(qmf::derive_seed(seed, "pb-msg"));
  qmf::SplitMix64 chan_stream(qmf::derive_seed(seed, "pb-chan"));

  std::uint64_t bit_errors = 0, block_errors = 0;
  for (std::uint64_t f = 0; f < frames; ++f) {
    qmf::BitVector msg(code.info_count());
    for (auto& b : msg) b = static_cast<std::uint8_t>(msg_stream.next_u64() & 1);
    qmf::BitVector x = code.encode(msg);
    for (auto& b : x)
      if (chan_stream.next_unit() < p) b ^= 1;
    const qmf::BitVector est = code.decode(x);
    bool any = false;
    for (std::size_t i = 0; i < msg.size(); ++i)
      if (est[i] != msg[i]) {
        ++bit_errors;
        any = true;
      }
    if (any) ++block_errors;
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw qmf::IoError("cannot write " + out_path);
    out = &file;
  }
  const double denom_bits = static_cast<double>(frames * code.info_count());
  *out << "n,rate,p,frames,bit_errors,block_errors,ber,bler\n";
  *out << n << ',' << rate << ',' << p << ',' << frames << ',' << bit_errors << ','
       << block_errors << ',' << (denom_bits > 0 ? bit_errors / denom_bits : 0.0) << ','
       << (frames > 0 ? static_cast<double>(block_errors) / static_cast<double>(frames) : 0.0)
       << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, const CLI::Option* seed_opt,
                 std::uint64_t seed_flag, const std::string& out_dir, bool zero_noise,
                 std::uint64_t frames_override) {
  qmf::PipelineConfig cfg = qmf::load_config_file(config_path);
  cfg.seed = resolve_seed(seed_opt, seed_flag, cfg.seed);
  if (zero_noise) cfg.zero_noise = true;
  if (frames_override) cfg.frames = frames_override;

  // Network path is relative to the config file unless absolute.
  std::filesystem::path net_path(cfg.network_path);
  if (net_path.is_relative())
    net_path = std::filesystem::path(config_path).parent_path() / net_path;

  std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "frames.csv").string();
  const std::string summary = (dir / "summary.json").string();

  const qmf::LayeredNetwork net = qmf::load_network_file(net_path.string());
  const qmf::CampaignSummary s = qmf::run_campaign_files(net, cfg, csv, summary);

  std::cout << std::fixed << std::setprecision(6);
  std::cout << "frames=" << s.frames << " chunks/frame=" << s.dims.n_chunks
            << " n_outer=" << s.dims.n_outer << " k_info=" << s.dims.k_info
            << " pad_bits=" << s.dims.pad_bits << "\n";
  std::cout << "c_iid=" << s.c_iid << " c_bar_upper=" << s.c_bar_upper
            << "; prescribed params: ell=" << s.prescribed_params.ell
            << " r_i=" << s.prescribed_params.r_i
            << (s.prescribed_params.feasible ? " (feasible)" : " (infeasible at this scale)")
            << "\n";
  std::cout << "design_crossover=" << s.design_crossover;
  if (s.calibration_failure_rate)
    std::cout << " (calibrated from chunk failure rate " << *s.calibration_failure_rate << ")";
  std::cout << "\n";
  std::cout << "chunk_failure_rate=" << s.chunk_failure_rate
            << " frame_error_rate=" << s.frame_error_rate << " [" << s.fer_ci_low << ", "
            << s.fer_ci_high << "]\n";
  std::cout << "failures: clip=" << s.clip_failures << " qmiss=" << s.qmiss_failures
            << " ambiguous=" << s.ambiguous_failures
            << " no_candidate=" << s.no_candidate_failures
            << " completeness_violations=" << s.completeness_violations << "\n";
  std::cout << "outputs: " << csv << " " << summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concatenated polar + quantize-map-and-forward simulator for layered "
               "Gaussian relay networks"};
  app.require_subcommand(1);

  std::uint64_t seed_flag = 1;

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Cut-set and analytic bound calculators");
  bounds->require_subcommand(1);
  std::string net_path, json_path;
  auto* cutset = bounds->add_subcommand("cutset", "Evaluate every source-sink cut");
  cutset->add_option("--network", net_path, "network description file")->required();
  cutset->add_option("--json", json_path, "write machine-readable report ('-' for stdout)");
  std::string all_net;
  std::uint64_t all_chunks = 1000;
  auto* ball = bounds->add_subcommand("all", "Print scheme parameters and every bound");
  ball->add_option("--network", all_net, "network description file")->required();
  ball->add_option("--chunks", all_chunks, "chunk count used for the concentration bound");

  // noise-set
  auto* ns = app.add_subcommand("noise-set", "Candidate quantized noise sets");
  ns->require_subcommand(1);
  auto* build = ns->add_subcommand("build", "Construct Z_ell and serialize it");
  std::size_t ns_ell = 1;
  double ns_sigma = 1.0;
  bool ns_exact = false, ns_sampled = false;
  std::string ns_out;
  build->add_option("--ell", ns_ell, "block length")->required();
  build->add_option("--sigma", ns_sigma, "per-component noise std (default 1)");
  build->add_flag("--exact", ns_exact, "deterministic construction (default)");
  build->add_flag("--sampled", ns_sampled, "coupon-collector construction");
  auto* ns_seed_opt = build->add_option("--seed", seed_flag, "master seed");
  build->add_option("--out", ns_out, "output file ('-' for stdout)");

  // polar-bench
  auto* pb = app.add_subcommand("polar-bench", "Polar code BSC Monte Carlo");
  std::size_t pb_n = 1024;
  double pb_p = 0.02, pb_rate = 0.5;
  std::uint64_t pb_frames = 1000;
  std::string pb_out;
  pb->add_option("--n", pb_n, "block length (power of two)")->required();
  pb->add_option("--p", pb_p, "BSC crossover")->required();
  pb->add_option("--rate", pb_rate, "code rate")->required();
  pb->add_option("--frames", pb_frames, "frame count");
  auto* pb_seed_opt = pb->add_option("--seed", seed_flag, "master seed");
  pb->add_option("--out", pb_out, "CSV output ('-' for stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "End-to-end Monte Carlo campaign");
  std::string sim_config, sim_out_dir;
  bool sim_zero_noise = false;
  std::uint64_t sim_frames = 0;
  sim->add_option("--config", sim_config, "JSON campaign configuration")->required();
  auto* sim_seed_opt = sim->add_option("--seed", seed_flag, "master seed override");
  sim->add_option("--out-dir", sim_out_dir, "output directory (default .)");
  sim->add_flag("--zero-noise", sim_zero_noise, "force the channel noise to zero");
  sim->add_option("--frames", sim_frames, "frame count override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cutset->parsed()) return cmd_bounds_cutset(net_path, json_path);
    if (ball->parsed()) return cmd_bounds_all(all_net, all_chunks);
    if (build->parsed()) {
      if (ns_exact && ns_sampled)
        throw qmf::ConfigError("choose one of --exact / --sampled");
      const std::uint64_t seed = resolve_seed(ns_seed_opt, seed_flag, 1);
      return cmd_noise_set(ns_ell, ns_sigma, ns_sampled, seed, ns_out);
    }
    if (pb->parsed()) {
      const std::uint64_t seed = resolve_seed(pb_seed_opt, seed_flag, 1);
      return cmd_polar_bench(pb_n, pb_p, pb_rate, pb_frames, seed, pb_out);
    }
    if (sim->parsed())
      return cmd_simulate(sim_config, sim_seed_opt, seed_flag, sim_out_dir, sim_zero_noise,
                          sim_frames);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
