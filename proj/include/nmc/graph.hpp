#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "nmc/distributions.hpp"
#include "nmc/dual.hpp"
#include "nmc/random.hpp"

namespace nmc {

class CycleDetected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class UnknownParent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Parent values handed to a distribution builder, indexed in the order the
// parents were declared. operator[] yields T; data() yields the raw doubles
// of any parent that is not currently being differentiated. Observed parents
// are never lifted to Dual, so builders read them through data().
template <class T>
class ParentValues {
 public:
  using value_type = T;

  ParentValues(std::vector<std::span<const T>> values, std::vector<std::span<const double>> data,
               std::vector<std::vector<T>> storage)
      : values_(std::move(values)), data_(std::move(data)), storage_(std::move(storage)) {}

  ParentValues(ParentValues&&) noexcept = default;
  ParentValues& operator=(ParentValues&&) noexcept = default;

  std::size_t size() const { return values_.size(); }
  std::span<const T> operator[](std::size_t i) const;
  const T& scalar(std::size_t i) const { return (*this)[i][0]; }
  std::span<const double> data(std::size_t i) const;

 private:
  std::vector<std::span<const T>> values_;
  std::vector<std::span<const double>> data_;
  std::vector<std::vector<T>> storage_;
};

// Maps parent values to the node's distribution, once per scalar type.
// Construct from a generic lambda `[](const auto& parents) { ... }`.
class DistBuilder {
 public:
  DistBuilder() = default;
  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, DistBuilder>)
  DistBuilder(F f)  // NOLINT: implicit from callables
      : as_double_(f), as_dual_(f) {}

  Distribution<double> operator()(const ParentValues<double>& p) const { return as_double_(p); }
  Distribution<Dual> operator()(const ParentValues<Dual>& p) const { return as_dual_(p); }

 private:
  std::function<Distribution<double>(const ParentValues<double>&)> as_double_;
  std::function<Distribution<Dual>(const ParentValues<Dual>&)> as_dual_;
};

struct NodeSpec {
  std::string name;
  std::vector<std::string> parents;
  Support support;
  std::size_t dim = 1;  // length of the node's value
  DistBuilder builder;
  std::optional<Eigen::VectorXd> observed{};
};

struct Node {
  std::string name;
  std::vector<NodeId> parents;
  Support support;
  std::size_t dim = 1;
  DistBuilder builder;
  std::optional<Eigen::VectorXd> observed{};

  bool is_observed() const { return observed.has_value(); }
};

using Observations = std::map<std::string, Eigen::VectorXd>;

// Immutable after construction; safe to share across chains.
class Model {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& children(NodeId id) const { return children_.at(id); }
  // Latent nodes in topological order.
  const std::vector<NodeId>& latent() const { return latent_; }

  std::optional<NodeId> find(std::string_view name) const;
  NodeId id(std::string_view name) const;

  // Copy with observed values replaced; shapes must match.
  Model with_observations(const Observations& obs) const;

 private:
  friend Model build_model(std::vector<NodeSpec> specs);

  std::vector<Node> nodes_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> latent_;
  std::map<std::string, NodeId, std::less<>> index_;
};

// Topologically sorts the specs (declaration order breaks ties) and builds
// the child index.
Model build_model(std::vector<NodeSpec> specs);

// A pending single-node change: the new value and the recomputed scores of
// the node and its children. Committing it is the only way a World changes.
struct Move {
  NodeId node = kNoNode;
  Eigen::VectorXd value;
  std::vector<std::pair<NodeId, double>> scores;
  double delta = 0.0;
};

class World {
 public:
  std::size_t size() const { return values_.size(); }
  const Eigen::VectorXd& value(NodeId id) const { return values_.at(id); }
  double score(NodeId id) const { return scores_.at(id); }
  // Sum of the cached per-node scores.
  double log_prob() const;

  void commit(Move move);

 private:
  friend World init_world(const Model& model, Rng& rng);
  friend World make_world(const Model& model, std::vector<Eigen::VectorXd> values);

  std::vector<Eigen::VectorXd> values_;
  std::vector<double> scores_;
};

World init_world(const Model& model, Rng& rng);
// World with an explicit assignment for every node (observed entries must
// equal the observations).
World make_world(const Model& model, std::vector<Eigen::VectorXd> values);

// A node's own log-density given its parents' current values.
double node_log_density(const Model& model, const World& world, NodeId id);
// Joint log-density recomputed from scratch.
double full_log_density(const Model& model, const World& world);

// Scores the change of `id` to `value` without touching the world.
// Throws OutOfSupport when value is outside the node's support.
Move prepare_move(const Model& model, const World& world, NodeId id, Eigen::VectorXd value);

std::pair<World, double> apply_move(const Model& model, const World& world, NodeId id,
                                    Eigen::VectorXd value);

// v -> log p(node = v | parents) + sum over children of log p(child | node = v).
// Holds references to model and world; does not depend on the node's own
// current value.
class BlanketScore {
 public:
  BlanketScore(const Model& model, const World& world, NodeId id);

  template <class T>
  T operator()(std::span<const T> v) const;

  double operator()(const Eigen::VectorXd& v) const {
    return (*this)(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  }

  NodeId node() const { return id_; }

 private:
  const Model* model_;
  const World* world_;
  NodeId id_;
};

BlanketScore blanket_score_fn(const Model& model, const World& world, NodeId id);

}  // namespace nmc
