#include "qmfnet/network.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace qmf {

LayeredNetwork::LayeredNetwork(std::vector<std::string> names, std::vector<int> layer_of,
                               std::vector<Edge> edges)
    : names_(std::move(names)), layer_of_(std::move(layer_of)), edges_(std::move(edges)) {
  const int n = size();
  if (n < 2) throw MalformedDescription("network needs at least a source and a sink");
  if (static_cast<int>(names_.size()) != n)
    throw MalformedDescription("node name/layer count mismatch");

  num_layers_ = *std::max_element(layer_of_.begin(), layer_of_.end());
  for (int l : layer_of_)
    if (l < 1 || l > num_layers_) throw MalformedDescription("layer index out of range");

  by_layer_.assign(num_layers_, {});
  for (int v = 0; v < n; ++v) by_layer_[layer_of_[v] - 1].push_back(v);
  for (int l = 0; l < num_layers_; ++l)
    if (by_layer_[l].empty()) throw MalformedDescription("empty layer " + std::to_string(l + 1));

  if (by_layer_.front().size() != 1)
    throw MalformedDescription("layer 1 must contain exactly the source");
  if (by_layer_.back().size() != 1)
    throw MalformedDescription("last layer must contain exactly the sink");
  source_ = by_layer_.front().front();
  sink_ = by_layer_.back().front();
  if (num_layers_ < 2) throw MalformedDescription("source and sink cannot share a layer");

  in_edges_.assign(n, {});
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw MalformedDescription("edge endpoint out of range");
    if (layer_of_[e.to] != layer_of_[e.from] + 1)
      throw NotLayered("edge " + names_[e.from] + "->" + names_[e.to] +
                       " does not connect adjacent layers");
    in_edges_[e.to].push_back(e);
  }

  // Every node must lie on a source-sink path: reachable from the source
  // going forward and from the sink going backward.
  std::vector<char> fwd(n, 0), bwd(n, 0);
  fwd[source_] = 1;
  for (int l = 1; l < num_layers_; ++l)
    for (int v : by_layer_[l])
      for (const Edge& e : in_edges_[v])
        if (fwd[e.from]) fwd[v] = 1;
  bwd[sink_] = 1;
  for (int l = num_layers_ - 1; l >= 1; --l)
    for (int v : by_layer_[l])
      for (const Edge& e : in_edges_[v])
        if (bwd[v]) bwd[e.from] = 1;
  for (int v = 0; v < n; ++v)
    if (!fwd[v] || !bwd[v])
      throw DisconnectedNode("node " + names_[v] + " is not on any source-sink path");
}

int LayeredNetwork::node_index(const std::string& name) const {
  for (int v = 0; v < size(); ++v)
    if (names_[v] == name) return v;
  throw MalformedDescription("unknown node " + name);
}

std::complex<double> LayeredNetwork::gain(int from, int to) const {
  for (const Edge& e : in_edges_[to])
    if (e.from == from) return e.gain;
  return {0.0, 0.0};
}

LayeredNetwork load_network(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDescription(std::string("json parse failure: ") + e.what());
  }
  try {
    std::vector<std::string> names;
    std::vector<int> layers;
    std::unordered_map<std::string, int> index;
    for (const auto& nd : doc.at("nodes")) {
      index[nd.at("id").get<std::string>()] = static_cast<int>(names.size());
      names.push_back(nd.at("id").get<std::string>());
      layers.push_back(nd.at("layer").get<int>());
    }
    auto look = [&](const std::string& id) {
      auto it = index.find(id);
      if (it == index.end()) throw MalformedDescription("unknown node id " + id);
      return it->second;
    };
    std::vector<LayeredNetwork::Edge> edges;
    for (const auto& ed : doc.at("edges")) {
      edges.push_back({look(ed.at("from").get<std::string>()),
                       look(ed.at("to").get<std::string>()),
                       {ed.at("re").get<double>(), ed.value("im", 0.0)}});
    }
    LayeredNetwork net(std::move(names), std::move(layers), std::move(edges));
    if (net.node_index(doc.at("source").get<std::string>()) != net.source())
      throw MalformedDescription("declared source is not the unique layer-1 node");
    if (net.node_index(doc.at("sink").get<std::string>()) != net.sink())
      throw MalformedDescription("declared sink is not the unique last-layer node");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDescription(std::string("missing or malformed field: ") + e.what());
  }
}

LayeredNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedDescription("cannot open " + path);
  return load_network(in);
}

LayeredNetwork load_network_string(const std::string& text) {
  std::istringstream in(text);
  return load_network(in);
}

namespace {

// log2 det(I + H H*) through a Cholesky factorization of the Gram matrix.
double log2_det_capacity(const Eigen::MatrixXcd& h) {
  if (h.rows() == 0 || h.cols() == 0) return 0.0;
  Eigen::MatrixXcd gram =
      Eigen::MatrixXcd::Identity(h.rows(), h.rows()) + h * h.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    log_det += std::log(llt.matrixL()(i, i).real());
  return 2.0 * log_det / std::numbers::ln2_v<double>;
}

}  // namespace

CutSetReport cutset_iid(const LayeredNetwork& net) {
  const int n = net.size();
  if (n > 20) throw TooManyNodes("cut enumeration guard: |N| > 20");

  std::vector<int> relays;
  for (int v = 0; v < n; ++v)
    if (v != net.source() && v != net.sink()) relays.push_back(v);
  const int r = static_cast<int>(relays.size());

  CutSetReport report;
  report.per_cut.reserve(std::size_t{1} << r);

  std::vector<char> in_cut(n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    std::fill(in_cut.begin(), in_cut.end(), 0);
    in_cut[net.source()] = 1;
    for (int i = 0; i < r; ++i)
      if (mask & (std::uint64_t{1} << i)) in_cut[relays[i]] = 1;

    double bits = 0.0;
    for (int l = 2; l <= net.layers(); ++l) {
      std::vector<int> tx, rx;
      for (int v : net.nodes_at_layer(l - 1))
        if (in_cut[v]) tx.push_back(v);
      for (int v : net.nodes_at_layer(l))
        if (!in_cut[v]) rx.push_back(v);
      if (tx.empty() || rx.empty()) continue;
      Eigen::MatrixXcd h(rx.size(), tx.size());
      for (std::size_t i = 0; i < rx.size(); ++i)
        for (std::size_t j = 0; j < tx.size(); ++j)
          h(i, j) = net.gain(tx[j], rx[i]);
      bits += log2_det_capacity(h);
    }

    CutSetReport::CutValue cv;
    cv.bits = bits;
    for (int v = 0; v < n; ++v)
      if (in_cut[v]) cv.cut.push_back(v);
    report.per_cut.push_back(std::move(cv));
  }

  report.c_iid = report.per_cut.front().bits;
  for (const auto& cv : report.per_cut) report.c_iid = std::min(report.c_iid, cv.bits);
  report.c_bar_upper = report.c_iid + 2.0 * n;
  return report;
}

}  // namespace qmf
