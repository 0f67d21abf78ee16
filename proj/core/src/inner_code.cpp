#include "qmfnet/inner_code.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qmf {

std::int32_t noise_slack_delta(std::size_t ell) {
  return static_cast<std::int32_t>(
      std::ceil(std::sqrt(2.0 * static_cast<double>(ell) * std::numbers::ln2)));
}

std::map<int, RelayAlphabet> compute_alphabets(const LayeredNetwork& net, std::size_t ell,
                                               double codebook_comp_std) {
  const std::int32_t delta = noise_slack_delta(ell);
  const double quantile = std::sqrt(2.0 * static_cast<double>(ell) * std::numbers::ln2);
  std::map<int, RelayAlphabet> out;
  for (int v = 0; v < net.size(); ++v) {
    const auto& in = net.in_edges(v);
    if (in.empty()) continue;
    double gain_sum = 0.0;
    for (const auto& e : in) gain_sum += std::abs(e.gain);
    RelayAlphabet a;
    a.node = v;
    a.delta_i = delta;
    a.m_i = static_cast<std::int32_t>(std::ceil(gain_sum * quantile * codebook_comp_std));
    a.s_i = a.m_i + a.delta_i;
    out.emplace(v, a);
  }
  return out;
}

InnerCodeInstance::InnerCodeInstance(const LayeredNetwork& net, std::size_t ell,
                                     double rate_bits, std::uint64_t master_seed,
                                     std::uint64_t chunk_index, double codebook_comp_std,
                                     std::optional<std::map<int, RelayAlphabet>> alphabet_override)
    : net_(&net),
      ell_(ell),
      rate_bits_(rate_bits),
      chunk_(chunk_index),
      codebook_comp_std_(codebook_comp_std) {
  const double bits = std::max(0.0, rate_bits) * static_cast<double>(ell);
  message_bits_ = static_cast<std::size_t>(std::ceil(bits - 1e-12));
  if (message_bits_ > 62) throw MessageOutOfRange("message space above 62 bits");
  codebook_key_ = derive_seed(master_seed, "cbk", {chunk_index});
  for (int v = 0; v < net.size(); ++v)
    if (!net.in_edges(v).empty())
      relay_keys_.emplace(v, derive_seed(master_seed, "rly",
                                         {chunk_index, static_cast<std::uint64_t>(v)}));
  alphabets_ = alphabet_override ? std::move(*alphabet_override)
                                 : compute_alphabets(net, ell, codebook_comp_std);
}

ComplexBlock InnerCodeInstance::encode_message(std::uint64_t u) const {
  if (u >= message_space()) throw MessageOutOfRange("message index out of range");
  GaussianStream stream(derive_seed(codebook_key_, "cw", {u}));
  return sample_noise_block(ell_, stream, codebook_comp_std_);
}

GaussianIntTuple InnerCodeInstance::clamp_to_alphabet(int node, const GaussianIntTuple& t,
                                                      bool* clipped) const {
  const RelayAlphabet& a = alphabets_.at(node);
  bool any = false;
  GaussianIntTuple out = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    GaussianInt g = t.at(i);
    if (g.re > a.s_i || g.re < -a.s_i || g.im > a.s_i || g.im < -a.s_i) {
      any = true;
      g.re = std::clamp(g.re, -a.s_i, a.s_i);
      g.im = std::clamp(g.im, -a.s_i, a.s_i);
      out.set(i, g);
    }
  }
  if (clipped) *clipped = any;
  return out;
}

ComplexBlock InnerCodeInstance::relay_map(int node, const GaussianIntTuple& clamped) const {
  GaussianStream stream(derive_seed(relay_keys_.at(node), "map", clamped.packed()));
  return sample_noise_block(ell_, stream, codebook_comp_std_);
}

InnerCodeInstance::ForwardResult InnerCodeInstance::relay_forward(
    int node, const ComplexBlock& received) const {
  bool clipped = false;
  const GaussianIntTuple q = clamp_to_alphabet(node, round_block(received), &clipped);
  return {relay_map(node, q), clipped};
}

namespace {

struct NodeCandidates {
  int node = -1;
  std::vector<ComplexBlock> blocks;
};

// Decoder working state for one message hypothesis.
struct MessageSearch {
  const InnerCodeInstance& inst;
  const LayeredNetwork& net;
  const NoiseSetBundle& bundle;
  const GaussianIntTuple& obs_rounded;
  const std::vector<GaussianIntTuple>& q_list;
  std::uint64_t examined = 0;
  // Relay random functions memoized per (node, clamped reception) so that
  // overlapping hypotheses across branches reuse one evaluation.
  std::map<int, std::unordered_map<GaussianIntTuple, ComplexBlock, TupleHash>> map_memo;

  const ComplexBlock& relay_map_cached(int node, const GaussianIntTuple& clamped) {
    auto& per_node = map_memo[node];
    auto it = per_node.find(clamped);
    if (it == per_node.end())
      it = per_node.emplace(clamped, inst.relay_map(node, clamped)).first;
    return it->second;
  }

  // Candidate quantized receptions (deduplicated after clamping) mapped
  // through the relay's random function.
  NodeCandidates candidates_for(int node, const ComplexBlock& clean) {
    NodeCandidates cand;
    cand.node = node;
    const GaussianIntTuple base = round_block(clean);
    std::unordered_set<GaussianIntTuple, TupleHash> seen;
    seen.reserve(q_list.size() * 2);
    for (const auto& q : q_list) {
      GaussianIntTuple reception(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        const GaussianInt b = base.at(i), d = q.at(i);
        reception.set(i, {b.re + d.re, b.im + d.im});
      }
      const GaussianIntTuple clamped = inst.clamp_to_alphabet(node, reception);
      if (seen.insert(clamped).second) cand.blocks.push_back(relay_map_cached(node, clamped));
    }
    return cand;
  }

  ComplexBlock clean_at(int node, const std::map<int, ComplexBlock>& tx) const {
    ComplexBlock clean(inst.ell(), {0.0, 0.0});
    for (const auto& e : net.in_edges(node)) {
      auto it = tx.find(e.from);
      if (it == tx.end()) continue;
      for (std::size_t t = 0; t < clean.size(); ++t) clean[t] += e.gain * it->second[t];
    }
    return clean;
  }

  bool sink_accepts(const ComplexBlock& clean_sink) {
    ++examined;
    GaussianIntTuple resid(inst.ell());
    for (std::size_t i = 0; i < resid.size(); ++i) {
      const GaussianInt o = obs_rounded.at(i);
      const GaussianInt c = round_complex(clean_sink[i]);
      resid.set(i, {o.re - c.re, o.im - c.im});
    }
    return bundle.q_contains(resid);
  }

  // Enumerates the product of candidate receptions over the relays of this
  // layer, recursing into the next layer for every combination.
  bool explore_layer(int layer, std::map<int, ComplexBlock>& tx) {
    if (layer == net.layers()) {
      return sink_accepts(clean_at(net.sink(), tx));
    }
    const auto& relays = net.nodes_at_layer(layer);
    std::vector<NodeCandidates> cands;
    cands.reserve(relays.size());
    for (int v : relays) cands.push_back(candidates_for(v, clean_at(v, tx)));

    // At the final relay layer with several relays the sink test factors:
    // fix all but one relay, precompute the remaining relay's possible sink
    // contributions sorted by the real part of their first sample, and scan
    // only the window that can keep the sink residual inside the Q_ell box.
    if (layer == net.layers() - 1 && cands.size() >= 2)
      return explore_last_layer_indexed(cands, tx);

    std::map<int, ComplexBlock> next_tx;
    std::vector<std::size_t> pick(cands.size(), 0);
    while (true) {
      next_tx.clear();
      for (std::size_t i = 0; i < cands.size(); ++i)
        next_tx.emplace(cands[i].node, cands[i].blocks[pick[i]]);
      if (explore_layer(layer + 1, next_tx)) return true;
      std::size_t pos = 0;
      while (pos < pick.size() && pick[pos] + 1 == cands[pos].blocks.size()) pick[pos++] = 0;
      if (pos == pick.size()) return false;
      ++pick[pos];
    }
  }

  bool explore_last_layer_indexed(const std::vector<NodeCandidates>& cands,
                                  const std::map<int, ComplexBlock>& tx) {
    const int sink = net.sink();
    const std::size_t last = cands.size() - 1;
    const std::complex<double> h_last = net.gain(cands[last].node, sink);

    // Sink contributions of the indexed relay, sorted by Re of sample 0.
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(cands[last].blocks.size());
    std::vector<ComplexBlock> contrib(cands[last].blocks.size());
    for (std::size_t j = 0; j < cands[last].blocks.size(); ++j) {
      ComplexBlock w(inst.ell());
      for (std::size_t t = 0; t < w.size(); ++t) w[t] = h_last * cands[last].blocks[j][t];
      order.emplace_back(w[0].real(), j);
      contrib[j] = std::move(w);
    }
    std::sort(order.begin(), order.end());

    // Every in-edge of the sink originates in this layer, so the partial
    // sums below cover the whole superposition.
    const double box = static_cast<double>(bundle.q_component_bound()) + 0.5;
    const GaussianInt obs0 = obs_rounded.at(0);

    ComplexBlock partial(inst.ell(), {0.0, 0.0});
    std::vector<std::size_t> pick(last, 0);
    while (true) {
      std::fill(partial.begin(), partial.end(), std::complex<double>{0.0, 0.0});
      for (std::size_t i = 0; i < last; ++i) {
        const std::complex<double> h = net.gain(cands[i].node, sink);
        const ComplexBlock& b = cands[i].blocks[pick[i]];
        for (std::size_t t = 0; t < partial.size(); ++t) partial[t] += h * b[t];
      }
      const double lo = static_cast<double>(obs0.re) - box - partial[0].real();
      const double hi = static_cast<double>(obs0.re) + box - partial[0].real();
      auto it = std::lower_bound(order.begin(), order.end(), std::make_pair(lo, std::size_t{0}));
      for (; it != order.end() && it->first <= hi; ++it) {
        const ComplexBlock& w = contrib[it->second];
        ++examined;
        bool ok = true;
        for (std::size_t t = 0; t < w.size() && ok; ++t) {
          const GaussianInt o = obs_rounded.at(t);
          const GaussianInt c = round_complex(partial[t] + w[t]);
          if (std::abs(o.re - c.re) > bundle.q_component_bound() ||
              std::abs(o.im - c.im) > bundle.q_component_bound())
            ok = false;
        }
        if (ok) {
          GaussianIntTuple resid(inst.ell());
          for (std::size_t t = 0; t < w.size(); ++t) {
            const GaussianInt o = obs_rounded.at(t);
            const GaussianInt c = round_complex(partial[t] + w[t]);
            resid.set(t, {o.re - c.re, o.im - c.im});
          }
          if (bundle.q_contains(resid)) return true;
        }
      }
      std::size_t pos = 0;
      while (pos < pick.size() && pick[pos] + 1 == cands[pos].blocks.size()) pick[pos++] = 0;
      if (pos == pick.size()) return false;
      ++pick[pos];
    }
  }
};

}  // namespace

ChunkDecodeResult decode_chunk(const InnerCodeInstance& inst, const LayeredNetwork& net,
                               const NoiseSetBundle& bundle, const ComplexBlock& observation,
                               const ChunkGenie* genie) {
  if (bundle.ell() != inst.ell())
    throw LengthMismatch("noise set block length differs from code block length");
  if (observation.size() != inst.ell())
    throw LengthMismatch("observation length differs from code block length");

  const GaussianIntTuple obs_rounded = round_block(observation);
  const auto& q_list = bundle.q_enumeration();

  ChunkDecodeResult result;
  std::uint64_t first_accepting = 0;
  for (std::uint64_t u = 0; u < inst.message_space(); ++u) {
    MessageSearch search{inst, net, bundle, obs_rounded, q_list};
    std::map<int, ComplexBlock> tx;
    tx.emplace(net.source(), inst.encode_message(u));
    const bool ok = search.explore_layer(2, tx);
    result.hypotheses_examined += search.examined;
    if (ok) {
      if (result.accepting_messages == 0) first_accepting = u;
      ++result.accepting_messages;
      if (genie && u == genie->true_message) result.true_message_accepted = true;
    }
  }

  result.any_accepting = result.accepting_messages > 0;
  result.message = result.any_accepting ? first_accepting : 0;
  result.outcome = result.accepting_messages == 1 ? ChunkOutcome::decoded
                   : result.accepting_messages > 1 ? ChunkOutcome::ambiguous
                                                   : ChunkOutcome::no_candidate;
  if (genie) {
    result.completeness_violated =
        !genie->any_clip && genie->noise_in_q && !result.true_message_accepted;
  }
  return result;
}

double hypothesis_ceiling(const InnerCodeInstance& inst, const LayeredNetwork& net,
                          const NoiseSetBundle& bundle) {
  int relays = 0;
  for (int l = 2; l < net.layers(); ++l)
    relays += static_cast<int>(net.nodes_at_layer(l).size());
  return std::pow(2.0, static_cast<double>(inst.message_bits())) *
         std::pow(static_cast<double>(bundle.q_enumeration().size()),
                  static_cast<double>(relays));
}

}  // namespace qmf
