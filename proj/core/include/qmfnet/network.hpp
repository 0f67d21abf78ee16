#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf {

struct MalformedDescription : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotLayered : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DisconnectedNode : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyNodes : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Layered complex-gain relay network.  Node indices are dense (0..size-1);
// the source is the unique node on the first layer and the sink the unique
// node on the last.  Every edge goes from layer l to layer l+1 and every
// node lies on some source-sink path.  Immutable once built.
class LayeredNetwork {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    std::complex<double> gain;
  };

  // Throws NotLayered / DisconnectedNode / MalformedDescription on invalid input.
  LayeredNetwork(std::vector<std::string> names, std::vector<int> layer_of,
                 std::vector<Edge> edges);

  int size() const { return static_cast<int>(layer_of_.size()); }
  int layers() const { return num_layers_; }
  int layer_of(int node) const { return layer_of_[node]; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  const std::string& name(int node) const { return names_[node]; }
  int node_index(const std::string& name) const;

  const std::vector<int>& nodes_at_layer(int layer) const { return by_layer_[layer - 1]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // In-edges of `node`, i.e. the neighborhood the node listens to.
  const std::vector<Edge>& in_edges(int node) const { return in_edges_[node]; }

  std::complex<double> gain(int from, int to) const;

 private:
  std::vector<std::string> names_;
  std::vector<int> layer_of_;  // 1-based layer index per node
  std::vector<Edge> edges_;
  std::vector<std::vector<Edge>> in_edges_;
  std::vector<std::vector<int>> by_layer_;
  int num_layers_ = 0;
  int source_ = -1;
  int sink_ = -1;
};

// Parses the JSON network description:
//   {"nodes":[{"id":"S","layer":1},...],
//    "edges":[{"from":"S","to":"A","re":1.0,"im":0.0},...],
//    "source":"S","sink":"D"}
LayeredNetwork load_network(std::istream& in);
LayeredNetwork load_network_file(const std::string& path);
LayeredNetwork load_network_string(const std::string& text);

struct CutSetReport {
  struct CutValue {
    std::vector<int> cut;  // node indices in the cut (always contains the source)
    double bits = 0.0;
  };
  double c_iid = 0.0;       // min over cuts, in bits
  double c_bar_upper = 0.0; // c_iid + 2|N|
  std::vector<CutValue> per_cut;
};

// Evaluates every source-sink cut with i.i.d. unit-power complex Gaussian
// inputs: the cut value is the sum over layer transitions of
// log2 det(I + H H*) for the transfer matrix H from cut-side transmitters
// at layer l-1 to complement-side receivers at layer l.  Exhaustive over
// all 2^(|N|-2) cuts; guarded at |N| <= 20 (throws TooManyNodes).
CutSetReport cutset_iid(const LayeredNetwork& net);

}  // namespace qmf
