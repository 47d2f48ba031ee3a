#include "lidual/tree.hpp"

#include <cmath>
#include <sstream>

#include "lidual/errors.hpp"

namespace lidual {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

bool EventTree::is_ancestor_or_equal(NodeId ancestor, NodeId id) const {
  std::optional<NodeId> cur = id;
  while (cur) {
    if (*cur == ancestor) return true;
    if (nodes_[*cur].time <= nodes_[ancestor].time) return false;
    cur = nodes_[*cur].parent;
  }
  return false;
}

std::optional<NodeId> EventTree::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId EventTree::index_of(const std::string& name) const {
  auto id = find(name);
  if (!id) throw MalformedTree("unknown node '" + name + "'");
  return *id;
}

EventTree build_tree(const std::vector<NodeSpec>& specs) {
  if (specs.empty()) throw MalformedTree("empty node list");
  EventTree tree;
  tree.nodes_.reserve(specs.size());
  for (const auto& spec : specs) {
    if (tree.index_.count(spec.name)) throw MalformedTree("duplicate node '" + spec.name + "'");
    Node node;
    node.name = spec.name;
    const NodeId id = tree.nodes_.size();
    if (!spec.parent) {
      if (id != 0) throw MalformedTree("second root '" + spec.name + "'");
      node.time = 0;
      node.branch_probability = 1.0;
      node.path_probability = 1.0;
    } else {
      if (id == 0) throw MalformedTree("first node '" + spec.name + "' must be the root");
      auto it = tree.index_.find(*spec.parent);
      if (it == tree.index_.end())
        throw MalformedTree("orphan node '" + spec.name + "': parent '" + *spec.parent + "' not defined");
      if (!(spec.probability > 0.0 && spec.probability <= 1.0))
        throw MalformedTree("branch probability of '" + spec.name + "' not in (0,1]: " +
                            format_number(spec.probability));
      const NodeId parent = it->second;
      node.parent = parent;
      node.time = tree.nodes_[parent].time + 1;
      node.branch_probability = spec.probability;
      node.path_probability = tree.nodes_[parent].path_probability * spec.probability;
      tree.nodes_[parent].children.push_back(id);
    }
    if (spec.time && *spec.time != node.time)
      throw MalformedTree("time gap at '" + spec.name + "': declared " + std::to_string(*spec.time) +
                          ", parent implies " + std::to_string(node.time));
    tree.index_.emplace(node.name, id);
    tree.nodes_.push_back(std::move(node));
  }

  int horizon = 0;
  for (const auto& n : tree.nodes_) horizon = std::max(horizon, n.time);
  tree.horizon_ = horizon;
  tree.by_time_.assign(static_cast<std::size_t>(horizon) + 1, {});
  for (NodeId id = 0; id < tree.nodes_.size(); ++id) {
    const auto& n = tree.nodes_[id];
    tree.by_time_[static_cast<std::size_t>(n.time)].push_back(id);
    if (n.children.empty()) {
      if (n.time != horizon)
        throw MalformedTree("leaf '" + n.name + "' at time " + std::to_string(n.time) +
                            " before the horizon " + std::to_string(horizon));
      tree.leaves_.push_back(id);
      continue;
    }
    double sum = 0.0;
    for (NodeId c : n.children) sum += tree.nodes_[c].branch_probability;
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
      throw MalformedTree("branch probabilities sum " + format_number(sum) + " at node '" + n.name + "'");
  }
  return tree;
}

std::string check_stopping_region(const EventTree& tree, const StoppingRegion& region) {
  std::vector<int> hits(tree.size(), 0);
  for (NodeId s : region.stop_nodes) {
    if (s >= tree.size()) return "stop node id out of range";
    ++hits[s];
  }
  for (NodeId s : region.stop_nodes)
    if (hits[s] > 1) return "stop node '" + tree.node(s).name + "' listed twice";
  // Count stop nodes on each root-to-leaf path.
  std::vector<int> on_path(tree.size(), 0);
  for (NodeId id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    on_path[id] = (n.parent ? on_path[*n.parent] : 0) + hits[id];
    if (on_path[id] > 1) return "stop nodes not an antichain: '" + tree.node(id).name + "' follows another stop node";
  }
  for (NodeId leaf : tree.leaves())
    if (on_path[leaf] != 1) return "path to leaf '" + tree.node(leaf).name + "' contains no stop node";
  return {};
}

StoppingRegion terminal_region(const EventTree& tree) { return {tree.leaves()}; }

StoppingRegion root_region(const EventTree& tree) { return {{tree.root()}}; }

std::vector<bool> constrained_mask(const EventTree& tree, const StoppingRegion& region) {
  std::vector<bool> mask(tree.size(), false);
  for (NodeId s : region.stop_nodes) mask.at(s) = true;
  for (NodeId id = 0; id < tree.size(); ++id) {
    const auto& parent = tree.node(id).parent;
    if (parent && mask[*parent]) mask[id] = true;
  }
  return mask;
}

std::vector<NodeId> constrained_region(const EventTree& tree, const StoppingRegion& region) {
  const auto mask = constrained_mask(tree, region);
  std::vector<NodeId> out;
  for (NodeId id = 0; id < tree.size(); ++id)
    if (mask[id]) out.push_back(id);
  return out;
}

double expectation(const EventTree& tree, const AdaptedProcess& value, const AdaptedProcess& weight) {
  double sum = 0.0;
  for (NodeId id = 0; id < tree.size(); ++id) sum += tree.probability(id) * value.at(id) * weight.at(id);
  return sum;
}

}  // namespace lidual
