#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qmfnet/bounds.hpp"
#include "qmfnet/channel.hpp"
#include "qmfnet/inner_code.hpp"
#include "qmfnet/network.hpp"
#include "qmfnet/polar.hpp"
#include "qmfnet/quantize.hpp"
#include "qmfnet/scrambler.hpp"

namespace qmf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::string network_path;           // used by load_config / CLI
  std::size_t ell = 1;
  double r_i = 1.0;                   // inner rate override (bits/symbol)
  std::size_t n = 64;                 // requested channel uses per frame
  std::uint64_t frames = 100;
  std::uint64_t seed = 1;
  double noise_comp_std = 0.7071067811865476;  // per-component noise std
  double gain_scale = 1.0;            // multiplies every edge gain
  bool zero_noise = false;
  std::uint64_t calibration_frames = 100;
  std::optional<double> design_crossover;  // explicit override
  unsigned threads = 0;               // 0 = hardware concurrency
};

// Reads the JSON simulation config (network, ell, r_i, n, frames, seed,
// sigma convention, overrides).
PipelineConfig load_config(std::istream& in);
PipelineConfig load_config_file(const std::string& path);

// Sizing derived from (n, ell, r_i): the scrambled outer codeword is split
// into chunks of chunk_bits; the outer block length is the next power of
// two, with chunk count adjusted upward and trailing pad bits (transmitted
// but ignored) when the sizes do not divide evenly.
struct DerivedDims {
  std::size_t chunk_bits = 0;
  std::size_t n_chunks = 0;       // N
  std::size_t n_outer = 0;        // polar block length
  std::size_t k_info = 0;         // info bits (depends on the design crossover)
  std::size_t pad_bits = 0;       // N * chunk_bits - n_outer
  std::size_t channel_uses = 0;   // N * ell
};

struct FrameTrace {
  std::uint64_t frame = 0;
  BitVector message;   // w
  BitVector decoded;   // w~
  bool frame_error = false;
  std::uint64_t bit_flips_into_outer = 0;

  std::vector<ChunkOutcome> chunk_outcomes;  // failure-attributed, per chunk
  std::uint64_t chunk_failures = 0;
  std::uint64_t clip_failures = 0;
  std::uint64_t qmiss_failures = 0;
  std::uint64_t ambiguous_failures = 0;
  std::uint64_t no_candidate_failures = 0;
  std::uint64_t completeness_violations = 0;
  std::uint64_t scrambled_ones = 0;  // population count of the scrambled codeword
};

struct CampaignSummary {
  std::uint64_t frames = 0;
  DerivedDims dims;
  double c_iid = 0.0;
  double c_bar_upper = 0.0;
  SchemeParams prescribed_params;       // prescribed rates at c_bar_upper, with feasibility
  double design_crossover = 0.0;
  std::optional<double> calibration_failure_rate;

  std::uint64_t chunk_failures = 0;
  std::uint64_t clip_failures = 0;
  std::uint64_t qmiss_failures = 0;
  std::uint64_t ambiguous_failures = 0;
  std::uint64_t no_candidate_failures = 0;
  std::uint64_t completeness_violations = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t bit_flips = 0;
  std::uint64_t scrambled_ones = 0;

  double chunk_failure_rate = 0.0;   // empirical P_I over the campaign
  double frame_error_rate = 0.0;
  double fer_ci_low = 0.0;           // 95% Wilson interval
  double fer_ci_high = 0.0;
  double scrambled_ones_fraction = 0.0;

  // Concentration of chunk failures against the Chernoff bound, using the
  // calibration failure rate as q; absent when q is outside (0, 1/2).
  struct Concentration {
    double q = 0.0;
    double threshold = 0.0;          // 2 N q
    double empirical_fraction = 0.0; // frames with failures >= threshold
    double bound = 0.0;
    bool within_bound = false;       // empirical <= bound + 3 SE
  };
  std::optional<Concentration> concentration;

  // Mean erroneous chunks per frame vs N * calibration rate (3 SE check).
  struct ChunkExpectation {
    double mean_per_frame = 0.0;
    double expected = 0.0;
    double standard_error = 0.0;
    bool within_3se = false;
  };
  std::optional<ChunkExpectation> chunk_expectation;
};

// One fully configured end-to-end simulation: network, candidate noise
// sets, per-chunk inner codes, scrambler and outer polar code.  Immutable
// after construction; frames are independent and safe to run in parallel.
class Simulation {
 public:
  Simulation(LayeredNetwork net, PipelineConfig cfg);

  const LayeredNetwork& network() const { return net_; }
  const PipelineConfig& config() const { return cfg_; }
  const DerivedDims& dims() const { return dims_; }
  const NoiseSetBundle& bundle() const { return bundle_; }
  const PolarCode& outer_code() const { return *polar_; }
  const SchemeParams& prescribed_params() const { return prescribed_params_; }
  double design_crossover() const { return design_crossover_; }
  std::optional<double> calibration_failure_rate() const { return calib_rate_; }
  double c_iid() const { return cuts_.c_iid; }
  double c_bar_upper() const { return cuts_.c_bar_upper; }

  // Runs one frame; deterministic in (seed, purpose, frame).
  FrameTrace run_frame(std::uint64_t frame, std::string_view purpose = "frame") const;

  // Runs the configured number of frames in parallel and aggregates.
  CampaignSummary run_campaign(std::vector<FrameTrace>* traces = nullptr) const;

 private:
  struct ChunkRun {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    ChunkDecodeResult decode;
    ChunkGenie genie;
  };
  ChunkRun run_chunk(std::uint64_t frame, std::size_t chunk, std::uint64_t u,
                     std::string_view purpose) const;
  double calibrate();

  LayeredNetwork net_;
  PipelineConfig cfg_;
  DerivedDims dims_;
  CutSetReport cuts_;
  SchemeParams prescribed_params_;
  NoiseSetBundle bundle_;
  std::vector<InnerCodeInstance> chunk_codes_;
  std::optional<ScramblerState> scrambler_;
  std::optional<PolarCode> polar_;
  std::optional<double> calib_rate_;
  double design_crossover_ = 0.0;
};

// Full campaign with file outputs: per-frame CSV rows and a JSON summary.
// CSV bytes depend only on the seed and configuration.
CampaignSummary run_campaign_files(const LayeredNetwork& net, const PipelineConfig& cfg,
                                   const std::string& csv_path,
                                   const std::string& summary_path);

void write_campaign_csv(std::ostream& out, const std::vector<FrameTrace>& traces);
std::string campaign_summary_json(const CampaignSummary& s, const PipelineConfig& cfg);

// Returns a copy of the network with every gain multiplied by `factor`.
LayeredNetwork scale_gains(const LayeredNetwork& net, double factor);

}  // namespace qmf
