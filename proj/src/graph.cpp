#include "nmc/graph.hpp"

#include <queue>
#include <set>

namespace nmc {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Parent view for `child`. When `active` names one of its parents, that
// parent reads from `active_value` instead of the world.
template <class T>
ParentValues<T> gather(const Model& model, const World& world, NodeId child, NodeId active,
                       std::span<const T> active_value) {
  const Node& node = model.node(child);
  const std::size_t n = node.parents.size();
  std::vector<std::span<const T>> values(n);
  std::vector<std::span<const double>> data(n);
  std::vector<std::vector<T>> storage;
  if constexpr (!std::is_same_v<T, double>) storage.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = node.parents[i];
    if (p == active) {
      values[i] = active_value;
      if constexpr (std::is_same_v<T, double>) data[i] = active_value;
      continue;
    }
    const Eigen::VectorXd& v = world.value(p);
    data[i] = as_span(v);
    if constexpr (std::is_same_v<T, double>) {
      values[i] = as_span(v);
    } else {
      if (model.node(p).is_observed()) continue;
      storage.emplace_back(v.data(), v.data() + v.size());
      values[i] = storage.back();
    }
  }
  return ParentValues<T>(std::move(values), std::move(data), std::move(storage));
}

double score_with(const Model& model, const World& world, NodeId id,
                  std::span<const double> value) {
  const Node& node = model.node(id);
  const auto dist = node.builder(gather<double>(model, world, id, kNoNode, {}));
  return log_density(dist, value);
}

}  // namespace

template <class T>
std::span<const T> ParentValues<T>::operator[](std::size_t i) const {
  if constexpr (!std::is_same_v<T, double>) {
    if (values_.at(i).data() == nullptr && !data_.at(i).empty()) {
      throw std::logic_error("observed parents are only available through data()");
    }
  }
  return values_.at(i);
}

template <class T>
std::span<const double> ParentValues<T>::data(std::size_t i) const {
  const auto d = data_.at(i);
  if (d.data() == nullptr && !values_.at(i).empty()) {
    throw std::logic_error("data(): parent is being differentiated");
  }
  return d;
}

template class ParentValues<double>;
template class ParentValues<Dual>;

std::optional<NodeId> Model::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId Model::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw std::out_of_range("unknown node: " + std::string(name));
}

Model Model::with_observations(const Observations& obs) const {
  Model copy = *this;
  for (const auto& [name, value] : obs) {
    const NodeId id = copy.id(name);
    Node& node = copy.nodes_[id];
    if (!node.is_observed()) {
      throw std::invalid_argument("with_observations: node is latent: " + name);
    }
    if (static_cast<std::size_t>(value.size()) != node.dim) {
      throw std::invalid_argument("with_observations: shape mismatch for " + name);
    }
    if (!node.support.contains(as_span(value))) {
      throw OutOfSupport("with_observations: value outside support for " + name);
    }
    node.observed = value;
  }
  return copy;
}

Model build_model(std::vector<NodeSpec> specs) {
  std::map<std::string, std::size_t, std::less<>> declared;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!declared.emplace(specs[i].name, i).second) {
      throw std::invalid_argument("build_model: duplicate node id " + specs[i].name);
    }
  }
  const std::size_t n = specs.size();
  std::vector<std::vector<std::size_t>> parent_idx(n);
  std::vector<std::vector<std::size_t>> child_idx(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& parent : specs[i].parents) {
      const auto it = declared.find(parent);
      if (it == declared.end()) {
        throw UnknownParent("build_model: " + specs[i].name + " references undeclared " + parent);
      }
      parent_idx[i].push_back(it->second);
      child_idx[it->second].push_back(i);
      ++indegree[i];
    }
  }
  // Kahn's algorithm; the min-heap keeps declaration order among ready nodes.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t c : child_idx[i]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != n) throw CycleDetected("build_model: the parent graph has a cycle");

  std::vector<NodeId> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;

  Model model;
  model.nodes_.reserve(n);
  model.children_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    NodeSpec& spec = specs[order[k]];
    if (spec.observed) {
      if (static_cast<std::size_t>(spec.observed->size()) != spec.dim) {
        throw std::invalid_argument("build_model: observed value of " + spec.name +
                                    " does not match its dim");
      }
      if (!spec.support.contains(as_span(*spec.observed))) {
        throw OutOfSupport("build_model: observed value of " + spec.name + " outside support");
      }
    }
    Node node{spec.name, {}, spec.support, spec.dim, std::move(spec.builder),
              std::move(spec.observed)};
    for (std::size_t p : parent_idx[order[k]]) node.parents.push_back(position[p]);
    std::set<NodeId> unique(node.parents.begin(), node.parents.end());
    for (NodeId p : unique) model.children_[p].push_back(k);
    model.index_.emplace(node.name, k);
    if (!node.is_observed()) model.latent_.push_back(k);
    model.nodes_.push_back(std::move(node));
  }
  for (auto& c : model.children_) std::sort(c.begin(), c.end());
  return model;
}

double World::log_prob() const {
  double total = 0.0;
  for (double s : scores_) total += s;
  return total;
}

void World::commit(Move move) {
  values_.at(move.node) = std::move(move.value);
  for (const auto& [id, score] : move.scores) scores_.at(id) = score;
}

World init_world(const Model& model, Rng& rng) {
  World world;
  world.values_.resize(model.size());
  world.scores_.assign(model.size(), 0.0);
  for (NodeId id = 0; id < model.size(); ++id) {
    const Node& node = model.node(id);
    if (node.is_observed()) {
      world.values_[id] = *node.observed;
    } else {
      const auto dist = node.builder(gather<double>(model, world, id, kNoNode, {}));
      world.values_[id] = sample(dist, rng, node.dim);
    }
  }
  for (NodeId id = 0; id < model.size(); ++id) {
    world.scores_[id] = node_log_density(model, world, id);
  }
  return world;
}

World make_world(const Model& model, std::vector<Eigen::VectorXd> values) {
  if (values.size() != model.size()) {
    throw std::invalid_argument("make_world: one value per node required");
  }
  World world;
  world.values_ = std::move(values);
  world.scores_.assign(model.size(), 0.0);
  for (NodeId id = 0; id < model.size(); ++id) {
    const Node& node = model.node(id);
    if (static_cast<std::size_t>(world.values_[id].size()) != node.dim) {
      throw std::invalid_argument("make_world: wrong length for " + node.name);
    }
    if (node.is_observed() && world.values_[id] != *node.observed) {
      throw std::invalid_argument("make_world: observed node " + node.name + " was changed");
    }
  }
  for (NodeId id = 0; id < model.size(); ++id) {
    world.scores_[id] = node_log_density(model, world, id);
  }
  return world;
}

double node_log_density(const Model& model, const World& world, NodeId id) {
  return score_with(model, world, id, as_span(world.value(id)));
}

double full_log_density(const Model& model, const World& world) {
  double total = 0.0;
  for (NodeId id = 0; id < model.size(); ++id) total += node_log_density(model, world, id);
  return total;
}

Move prepare_move(const Model& model, const World& world, NodeId id, Eigen::VectorXd value) {
  const Node& node = model.node(id);
  if (node.is_observed()) throw std::invalid_argument("prepare_move: node is observed");
  if (static_cast<std::size_t>(value.size()) != node.dim ||
      !node.support.contains(as_span(value))) {
    throw OutOfSupport("prepare_move: value outside the support of " + node.name);
  }
  Move move;
  move.node = id;
  const double own = score_with(model, world, id, as_span(value));
  move.delta = own - world.score(id);
  move.scores.emplace_back(id, own);
  for (NodeId c : model.children(id)) {
    const Node& child = model.node(c);
    const auto dist =
        child.builder(gather<double>(model, world, c, id, as_span(value)));
    const double s = log_density(dist, as_span(world.value(c)));
    move.delta += s - world.score(c);
    move.scores.emplace_back(c, s);
  }
  move.value = std::move(value);
  return move;
}

std::pair<World, double> apply_move(const Model& model, const World& world, NodeId id,
                                    Eigen::VectorXd value) {
  Move move = prepare_move(model, world, id, std::move(value));
  const double delta = move.delta;
  World next = world;
  next.commit(std::move(move));
  return {std::move(next), delta};
}

BlanketScore::BlanketScore(const Model& model, const World& world, NodeId id)
    : model_(&model), world_(&world), id_(id) {
  if (model.node(id).is_observed()) {
    throw std::invalid_argument("blanket_score_fn: node is observed");
  }
}

template <class T>
T BlanketScore::operator()(std::span<const T> v) const {
  const Node& node = model_->node(id_);
  const auto own_dist = node.builder(gather<double>(*model_, *world_, id_, kNoNode, {}));
  T total = log_density(own_dist, v);
  for (NodeId c : model_->children(id_)) {
    const Node& child = model_->node(c);
    const auto dist = child.builder(gather<T>(*model_, *world_, c, id_, v));
    total += log_density(dist, as_span(world_->value(c)));
  }
  return total;
}

template double BlanketScore::operator()(std::span<const double>) const;
template Dual BlanketScore::operator()(std::span<const Dual>) const;

BlanketScore blanket_score_fn(const Model& model, const World& world, NodeId id) {
  return BlanketScore(model, world, id);
}

}  // namespace nmc
