#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lidual {

using NodeId = std::size_t;

/// Values of a scalar process, one entry per node of the tree it is bound to.
using AdaptedProcess = std::vector<double>;

/// One entry of the node list handed to build_tree.
struct NodeSpec {
  std::string name;
  std::optional<std::string> parent;  // none for the root
  double probability = 1.0;           // conditional probability given the parent
  std::optional<int> time;            // checked against parent time + 1 when present
};

struct Node {
  std::string name;
  std::optional<NodeId> parent;
  int time = 0;
  double branch_probability = 1.0;
  double path_probability = 1.0;
  std::vector<NodeId> children;
};

/// Finite filtered probability space. Node ids are positions in the node
/// list, so parents always precede their children. Immutable once built.
class EventTree {
 public:
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  NodeId root() const { return 0; }
  int horizon() const { return horizon_; }

  bool is_leaf(NodeId id) const { return nodes_[id].children.empty(); }
  double probability(NodeId id) const { return nodes_[id].path_probability; }
  /// p(child | parent).
  double branch_probability(NodeId id) const { return nodes_[id].branch_probability; }
  const std::vector<NodeId>& children(NodeId id) const { return nodes_[id].children; }
  int time(NodeId id) const { return nodes_[id].time; }

  const std::vector<NodeId>& leaves() const { return leaves_; }
  const std::vector<NodeId>& nodes_at(int t) const { return by_time_.at(static_cast<std::size_t>(t)); }

  /// True when `ancestor` lies on the root path of `id` (or equals it).
  bool is_ancestor_or_equal(NodeId ancestor, NodeId id) const;

  std::optional<NodeId> find(const std::string& name) const;
  NodeId index_of(const std::string& name) const;

 private:
  friend EventTree build_tree(const std::vector<NodeSpec>& specs);

  std::vector<Node> nodes_;
  std::vector<NodeId> leaves_;
  std::vector<std::vector<NodeId>> by_time_;
  std::unordered_map<std::string, NodeId> index_;
  int horizon_ = 0;
};

/// Validates and builds a tree. Throws MalformedTree on orphan nodes,
/// probabilities outside (0, 1], sibling sums off 1 by more than 1e-12,
/// time gaps, leaves at different depths, or duplicate names.
EventTree build_tree(const std::vector<NodeSpec>& specs);

/// The stopping time from which the no-borrowing constraint applies,
/// encoded as an antichain of nodes that meets every root-to-leaf path once.
struct StoppingRegion {
  std::vector<NodeId> stop_nodes;
};

/// Empty string when `region` is valid for `tree`, otherwise the first
/// violated property.
std::string check_stopping_region(const EventTree& tree, const StoppingRegion& region);

/// Stopping region made of every leaf (constraint at the horizon only).
StoppingRegion terminal_region(const EventTree& tree);
StoppingRegion root_region(const EventTree& tree);

/// Membership mask of the nodes at or after the stop node of their path.
std::vector<bool> constrained_mask(const EventTree& tree, const StoppingRegion& region);

/// Sorted ids of the nodes at or after the stop node of their path.
std::vector<NodeId> constrained_region(const EventTree& tree, const StoppingRegion& region);

/// Sum over nodes of P(n) * value(n) * weight(n).
double expectation(const EventTree& tree, const AdaptedProcess& value, const AdaptedProcess& weight);

}  // namespace lidual
