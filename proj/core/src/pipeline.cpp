#include "qmfnet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qmf {

namespace {

constexpr double kCodebookCompStd = 0.7071067811865476;  // unit transmit power

std::uint64_t bits_to_index(const BitVector& bits, std::size_t offset, std::size_t count) {
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < count; ++i) u = (u << 1) | (bits[offset + i] & 1);
  return u;
}

void index_to_bits(std::uint64_t u, std::size_t count, BitVector& bits, std::size_t offset) {
  for (std::size_t i = 0; i < count; ++i)
    bits[offset + i] = static_cast<std::uint8_t>((u >> (count - 1 - i)) & 1);
}

void wilson_interval(std::uint64_t successes, std::uint64_t trials, double& lo, double& hi) {
  if (trials == 0) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  const double z = 1.959963984540054;  // 95%
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = p + z2 / (2.0 * n);
  const double margin = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  lo = std::max(0.0, (centre - margin) / denom);
  hi = std::min(1.0, (centre + margin) / denom);
}

}  // namespace

PipelineConfig load_config(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    cfg.network_path = doc.at("network").get<std::string>();
    cfg.ell = doc.at("ell").get<std::size_t>();
    cfg.r_i = doc.at("r_i").get<double>();
    cfg.n = doc.at("n").get<std::size_t>();
    cfg.frames = doc.at("frames").get<std::uint64_t>();
    cfg.seed = doc.value("seed", std::uint64_t{1});
    if (doc.contains("sigma_convention")) {
      const auto s = doc.at("sigma_convention").get<std::string>();
      if (s == "per_component_unit")
        cfg.noise_comp_std = 1.0;
      else if (s == "total_unit")
        cfg.noise_comp_std = kCodebookCompStd;
      else
        throw ConfigError("sigma_convention must be per_component_unit or total_unit");
    }
    cfg.noise_comp_std = doc.value("noise_comp_std", cfg.noise_comp_std);
    cfg.gain_scale = doc.value("gain_scale", 1.0);
    cfg.zero_noise = doc.value("zero_noise", false);
    cfg.calibration_frames = doc.value("calibration_frames", std::uint64_t{100});
    if (doc.contains("design_crossover"))
      cfg.design_crossover = doc.at("design_crossover").get<double>();
    cfg.threads = doc.value("threads", 0u);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("missing or malformed config field: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_config(in);
}

LayeredNetwork scale_gains(const LayeredNetwork& net, double factor) {
  std::vector<std::string> names;
  std::vector<int> layers;
  for (int v = 0; v < net.size(); ++v) {
    names.push_back(net.name(v));
    layers.push_back(net.layer_of(v));
  }
  std::vector<LayeredNetwork::Edge> edges = net.edges();
  for (auto& e : edges) e.gain *= factor;
  return LayeredNetwork(std::move(names), std::move(layers), std::move(edges));
}

Simulation::Simulation(LayeredNetwork net, PipelineConfig cfg)
    : net_(cfg.gain_scale == 1.0 ? std::move(net) : scale_gains(net, cfg.gain_scale)),
      cfg_(std::move(cfg)),
      bundle_(NoiseSetBundle::build_exact(cfg_.ell, cfg_.noise_comp_std)) {
  if (cfg_.ell == 0) throw ConfigError("ell must be positive");
  if (cfg_.n == 0 || cfg_.n % cfg_.ell != 0)
    throw ConfigError("n must be a positive multiple of ell");

  dims_.chunk_bits = static_cast<std::size_t>(
      std::ceil(cfg_.r_i * static_cast<double>(cfg_.ell) - 1e-12));
  if (dims_.chunk_bits == 0) throw ConfigError("r_i * ell must yield at least one bit");
  const std::size_t n0 = cfg_.n / cfg_.ell;
  const std::size_t raw_bits = n0 * dims_.chunk_bits;
  dims_.n_outer = std::bit_ceil(raw_bits);
  dims_.n_chunks = (dims_.n_outer + dims_.chunk_bits - 1) / dims_.chunk_bits;
  if (dims_.n_chunks < n0) dims_.n_chunks = n0;
  dims_.pad_bits = dims_.n_chunks * dims_.chunk_bits - dims_.n_outer;
  dims_.channel_uses = dims_.n_chunks * cfg_.ell;

  cuts_ = cutset_iid(net_);
  prescribed_params_ = select_params(std::max(cuts_.c_bar_upper, 1.0), net_.size());

  chunk_codes_.reserve(dims_.n_chunks);
  for (std::size_t k = 0; k < dims_.n_chunks; ++k)
    chunk_codes_.emplace_back(net_, cfg_.ell, cfg_.r_i, cfg_.seed, k, kCodebookCompStd);

  scrambler_.emplace(dims_.n_outer, cfg_.seed);

  if (cfg_.design_crossover) {
    design_crossover_ = *cfg_.design_crossover;
  } else if (prescribed_params_.feasible) {
    design_crossover_ = 2.0 * prescribed_params_.p_i_bound;
  } else {
    design_crossover_ = calibrate();
  }
  design_crossover_ = std::clamp(design_crossover_, 1e-6, 0.499);

  const double r_o = 1.0 - entropy(design_crossover_);
  dims_.k_info = static_cast<std::size_t>(
      std::ceil(r_o * static_cast<double>(dims_.n_outer) - 1e-12));
  dims_.k_info = std::min(dims_.k_info, dims_.n_outer);
  polar_.emplace(dims_.n_outer, design_crossover_, dims_.k_info);
}

double Simulation::calibrate() {
  const std::uint64_t frames = std::max<std::uint64_t>(cfg_.calibration_frames, 1);
  std::uint64_t failures = 0;
  for (std::uint64_t f = 0; f < frames; ++f) {
    for (std::size_t k = 0; k < dims_.n_chunks; ++k) {
      SplitMix64 msg(derive_seed(cfg_.seed, "calib-msg", {f, k}));
      const std::uint64_t u = msg.next_below(chunk_codes_[k].message_space());
      const ChunkRun run = run_chunk(f, k, u, "calib");
      if (run.received != run.sent) ++failures;
    }
  }
  calib_rate_ = static_cast<double>(failures) /
                static_cast<double>(frames * dims_.n_chunks);
  return std::clamp(2.0 * *calib_rate_, 1e-6, 0.499);
}

Simulation::ChunkRun Simulation::run_chunk(std::uint64_t frame, std::size_t chunk,
                                           std::uint64_t u, std::string_view purpose) const {
  const InnerCodeInstance& inst = chunk_codes_[chunk];
  ChunkRun run;
  run.sent = u;
  run.genie.true_message = u;

  const std::string chan_tag = std::string(purpose) + "-chan";
  std::map<int, ComplexBlock> tx;
  tx.emplace(net_.source(), inst.encode_message(u));
  ComplexBlock observation;

  for (int layer = 2; layer <= net_.layers(); ++layer) {
    std::map<int, ComplexBlock> next_tx;
    for (int v : net_.nodes_at_layer(layer)) {
      ComplexBlock clean(cfg_.ell, {0.0, 0.0});
      for (const auto& e : net_.in_edges(v)) {
        const ComplexBlock& x = tx.at(e.from);
        for (std::size_t t = 0; t < clean.size(); ++t) clean[t] += e.gain * x[t];
      }
      ComplexBlock y = clean;
      if (!cfg_.zero_noise) {
        GaussianStream noise(derive_seed(cfg_.seed, chan_tag,
                                         {frame, chunk, static_cast<std::uint64_t>(v)}));
        for (auto& s : y) s += noise.next_complex(cfg_.noise_comp_std);
      }
      const GaussianIntTuple q = quantized_noise(y, clean);
      if (!bundle_.q_contains(q)) run.genie.noise_in_q = false;
      if (layer == net_.layers()) {
        observation = std::move(y);
      } else {
        auto fwd = inst.relay_forward(v, y);
        if (fwd.clipped) run.genie.any_clip = true;
        next_tx.emplace(v, std::move(fwd.block));
      }
    }
    tx = std::move(next_tx);
  }

  run.decode = decode_chunk(inst, net_, bundle_, observation, &run.genie);
  run.received = run.decode.any_accepting ? run.decode.message : 0;
  return run;
}

FrameTrace Simulation::run_frame(std::uint64_t frame, std::string_view purpose) const {
  if (!polar_ || !scrambler_) throw ConfigError("simulation not fully constructed");
  FrameTrace trace;
  trace.frame = frame;

  SplitMix64 msg_stream(derive_seed(cfg_.seed, std::string(purpose) + "-msg", {frame}));
  trace.message.resize(dims_.k_info);
  for (auto& b : trace.message) b = static_cast<std::uint8_t>(msg_stream.next_u64() & 1);

  const BitVector codeword = polar_->encode(trace.message);
  const BitVector scrambled = scrambler_->scramble(codeword);
  for (std::uint8_t b : scrambled) trace.scrambled_ones += b;

  BitVector padded(dims_.n_chunks * dims_.chunk_bits, 0);
  std::copy(scrambled.begin(), scrambled.end(), padded.begin());

  BitVector received(dims_.n_chunks * dims_.chunk_bits, 0);
  trace.chunk_outcomes.resize(dims_.n_chunks);
  for (std::size_t k = 0; k < dims_.n_chunks; ++k) {
    const std::uint64_t u = bits_to_index(padded, k * dims_.chunk_bits, dims_.chunk_bits);
    const ChunkRun run = run_chunk(frame, k, u, purpose);
    index_to_bits(run.received, dims_.chunk_bits, received, k * dims_.chunk_bits);
    if (run.decode.completeness_violated) ++trace.completeness_violations;

    const bool failed = run.received != run.sent;
    ChunkOutcome outcome = run.decode.outcome;
    if (failed) {
      ++trace.chunk_failures;
      if (run.genie.any_clip) {
        outcome = ChunkOutcome::clip_declared;
        ++trace.clip_failures;
      } else if (!run.genie.noise_in_q) {
        outcome = ChunkOutcome::noise_outside_q;
        ++trace.qmiss_failures;
      } else if (run.decode.accepting_messages > 1) {
        outcome = ChunkOutcome::ambiguous;
        ++trace.ambiguous_failures;
      } else {
        outcome = ChunkOutcome::no_candidate;
        ++trace.no_candidate_failures;
      }
    }
    trace.chunk_outcomes[k] = outcome;
  }

  BitVector into_outer(dims_.n_outer);
  for (std::size_t i = 0; i < dims_.n_outer; ++i) {
    into_outer[i] = received[i];
    if (received[i] != scrambled[i]) ++trace.bit_flips_into_outer;
  }

  trace.decoded = polar_->decode(scrambler_->descramble(into_outer));
  trace.frame_error = trace.decoded != trace.message;
  return trace;
}

CampaignSummary Simulation::run_campaign(std::vector<FrameTrace>* traces_out) const {
  std::vector<FrameTrace> traces(cfg_.frames);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(
      cfg_.threads ? cfg_.threads : hw, std::max<std::uint64_t>(cfg_.frames, 1)));
  if (cfg_.frames > 0) {
    std::vector<std::future<void>> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::uint64_t f = next.fetch_add(1); f < cfg_.frames; f = next.fetch_add(1))
          traces[f] = run_frame(f);
      }));
    }
    for (auto& fut : pool) fut.get();
  }

  CampaignSummary s;
  s.frames = cfg_.frames;
  s.dims = dims_;
  s.c_iid = cuts_.c_iid;
  s.c_bar_upper = cuts_.c_bar_upper;
  s.prescribed_params = prescribed_params_;
  s.design_crossover = design_crossover_;
  s.calibration_failure_rate = calib_rate_;

  for (const FrameTrace& t : traces) {
    s.chunk_failures += t.chunk_failures;
    s.clip_failures += t.clip_failures;
    s.qmiss_failures += t.qmiss_failures;
    s.ambiguous_failures += t.ambiguous_failures;
    s.no_candidate_failures += t.no_candidate_failures;
    s.completeness_violations += t.completeness_violations;
    s.frame_errors += t.frame_error ? 1 : 0;
    s.bit_flips += t.bit_flips_into_outer;
    s.scrambled_ones += t.scrambled_ones;
  }
  const std::uint64_t total_chunks = cfg_.frames * dims_.n_chunks;
  s.chunk_failure_rate =
      total_chunks ? static_cast<double>(s.chunk_failures) / static_cast<double>(total_chunks) : 0.0;
  s.frame_error_rate =
      cfg_.frames ? static_cast<double>(s.frame_errors) / static_cast<double>(cfg_.frames) : 0.0;
  wilson_interval(s.frame_errors, cfg_.frames, s.fer_ci_low, s.fer_ci_high);
  const std::uint64_t total_bits = cfg_.frames * dims_.n_outer;
  s.scrambled_ones_fraction =
      total_bits ? static_cast<double>(s.scrambled_ones) / static_cast<double>(total_bits) : 0.0;

  if (calib_rate_ && cfg_.frames > 0) {
    const double q = *calib_rate_;
    if (q > 0.0 && q < 0.5) {
      CampaignSummary::Concentration c;
      c.q = q;
      c.threshold = 2.0 * static_cast<double>(dims_.n_chunks) * q;
      std::uint64_t over = 0;
      for (const FrameTrace& t : traces)
        if (static_cast<double>(t.chunk_failures) >= c.threshold) ++over;
      c.empirical_fraction = static_cast<double>(over) / static_cast<double>(cfg_.frames);
      c.bound = chernoff_bound(dims_.n_chunks, q);
      const double b_eff = std::max({c.bound, c.empirical_fraction,
                                     1.0 / static_cast<double>(cfg_.frames)});
      const double se = std::sqrt(b_eff * (1.0 - b_eff) / static_cast<double>(cfg_.frames));
      c.within_bound = c.empirical_fraction <= c.bound + 3.0 * se;
      s.concentration = c;
    }

    CampaignSummary::ChunkExpectation e;
    e.mean_per_frame =
        static_cast<double>(s.chunk_failures) / static_cast<double>(cfg_.frames);
    e.expected = static_cast<double>(dims_.n_chunks) * q;
    e.standard_error = std::sqrt(static_cast<double>(dims_.n_chunks) * q * (1.0 - q) /
                                 static_cast<double>(cfg_.frames)) +
                       1e-12;
    e.within_3se = std::abs(e.mean_per_frame - e.expected) <= 3.0 * e.standard_error;
    s.chunk_expectation = e;
  }

  if (traces_out) *traces_out = std::move(traces);
  return s;
}

void write_campaign_csv(std::ostream& out, const std::vector<FrameTrace>& traces) {
  out << "frame,clip_failures,qmiss_failures,ambiguous_failures,no_candidate_failures,"
         "chunk_failures,bit_flips,frame_error\n";
  for (const FrameTrace& t : traces) {
    out << t.frame << ',' << t.clip_failures << ',' << t.qmiss_failures << ','
        << t.ambiguous_failures << ',' << t.no_candidate_failures << ',' << t.chunk_failures
        << ',' << t.bit_flips_into_outer << ',' << (t.frame_error ? 1 : 0) << '\n';
  }
}

std::string campaign_summary_json(const CampaignSummary& s, const PipelineConfig& cfg) {
  nlohmann::json j;
  j["frames"] = s.frames;
  j["config"] = {{"ell", cfg.ell},
                 {"r_i", cfg.r_i},
                 {"n", cfg.n},
                 {"seed", cfg.seed},
                 {"noise_comp_std", cfg.noise_comp_std},
                 {"gain_scale", cfg.gain_scale},
                 {"zero_noise", cfg.zero_noise}};
  j["dims"] = {{"chunk_bits", s.dims.chunk_bits}, {"n_chunks", s.dims.n_chunks},
               {"n_outer", s.dims.n_outer},       {"k_info", s.dims.k_info},
               {"pad_bits", s.dims.pad_bits},     {"channel_uses", s.dims.channel_uses}};
  j["cutset"] = {{"c_iid", s.c_iid}, {"c_bar_upper", s.c_bar_upper}};
  j["prescribed_params"] = {{"ell", s.prescribed_params.ell},
                            {"r_i", s.prescribed_params.r_i},
                            {"p_i_bound", s.prescribed_params.p_i_bound},
                            {"r_o", s.prescribed_params.r_o},
                            {"overall_rate", s.prescribed_params.overall_rate},
                            {"feasible", s.prescribed_params.feasible}};
  j["design_crossover"] = s.design_crossover;
  if (s.calibration_failure_rate)
    j["calibration_failure_rate"] = *s.calibration_failure_rate;
  else
    j["calibration_failure_rate"] = nullptr;
  if (s.frames == 0) {
    j["results"] = nullptr;
    return j.dump(2);
  }
  j["results"] = {{"chunk_failures", s.chunk_failures},
                  {"clip_failures", s.clip_failures},
                  {"qmiss_failures", s.qmiss_failures},
                  {"ambiguous_failures", s.ambiguous_failures},
                  {"no_candidate_failures", s.no_candidate_failures},
                  {"completeness_violations", s.completeness_violations},
                  {"chunk_failure_rate", s.chunk_failure_rate},
                  {"frame_errors", s.frame_errors},
                  {"frame_error_rate", s.frame_error_rate},
                  {"fer_ci_low", s.fer_ci_low},
                  {"fer_ci_high", s.fer_ci_high},
                  {"bit_flips", s.bit_flips},
                  {"scrambled_ones_fraction", s.scrambled_ones_fraction}};
  if (s.concentration) {
    j["concentration"] = {{"q", s.concentration->q},
                          {"threshold", s.concentration->threshold},
                          {"empirical_fraction", s.concentration->empirical_fraction},
                          {"bound", s.concentration->bound},
                          {"within_bound", s.concentration->within_bound}};
  }
  if (s.chunk_expectation) {
    j["chunk_expectation"] = {{"mean_per_frame", s.chunk_expectation->mean_per_frame},
                              {"expected", s.chunk_expectation->expected},
                              {"standard_error", s.chunk_expectation->standard_error},
                              {"within_3se", s.chunk_expectation->within_3se}};
  }
  return j.dump(2);
}

CampaignSummary run_campaign_files(const LayeredNetwork& net, const PipelineConfig& cfg,
                                   const std::string& csv_path,
                                   const std::string& summary_path) {
  Simulation sim(net, cfg);
  std::vector<FrameTrace> traces;
  CampaignSummary summary = sim.run_campaign(&traces);

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write " + csv_path);
  write_campaign_csv(csv, traces);

  std::ofstream sum(summary_path, std::ios::binary);
  if (!sum) throw IoError("cannot write " + summary_path);
  sum << campaign_summary_json(summary, cfg) << '\n';
  return summary;
}

}  // namespace qmf
