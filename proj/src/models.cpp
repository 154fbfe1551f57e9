#include "nmc/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nmc {

namespace {

template <class P>
using scalar_of = typename std::decay_t<P>::value_type;

constexpr double kCovariateScale = 10.0;
constexpr double kBlrAlphaScale = 10.0;
constexpr double kBlrBetaScale = 2.5;
constexpr double kNuShape = 2.0;
constexpr double kNuRate = 0.1;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Row-major copy so that row i is the contiguous slice [i*K, (i+1)*K).
Eigen::VectorXd flatten_rows(const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.size());
  const auto k = x.cols();
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.segment(i * k, k) = x.row(i).transpose();
  return out;
}

NodeSpec scalar_normal(std::string name, double loc, double scale, std::size_t dim = 1) {
  return {std::move(name), {}, Support::real(), dim, [loc, scale](const auto& p) {
            using T = scalar_of<decltype(p)>;
            return normal<T>(T(loc), T(scale));
          }};
}

// X belongs to the generative model, so it stays in the graph as an observed node.
NodeSpec covariate_node(const Eigen::MatrixXd& x) {
  NodeSpec spec = scalar_normal("X", 0.0, kCovariateScale, static_cast<std::size_t>(x.size()));
  spec.observed = flatten_rows(x);
  return spec;
}

// mu_i = alpha + x_i . beta, with alpha and beta the first two parents and X the third.
template <class P>
std::vector<scalar_of<P>> linear_predictor(const P& p, std::size_t n, std::size_t k) {
  using T = scalar_of<P>;
  const T& alpha = p.scalar(0);
  const std::span<const T> beta = p[1];
  const std::span<const double> x = p.data(2);
  std::vector<T> mu;
  mu.reserve(n);
  for (std::size_t i = 0; i < n; ++i) mu.push_back(alpha + dot(x.subspan(i * k, k), beta));
  return mu;
}

Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.j_sizes = data.j_sizes;
  if (!data.labels.empty()) {
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(data.labels[r]);
    return out;
  }
  out.x.resize(idx(rows.size()), data.x.cols());
  out.y.resize(idx(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(idx(i)) = data.x.row(idx(rows[i]));
    out.y[idx(i)] = data.y[idx(rows[i])];
  }
  return out;
}

Eigen::MatrixXd covariates(std::size_t n, std::size_t k, Rng& rng) {
  const Eigen::VectorXd flat = sample(normal(0.0, kCovariateScale), rng, n * k);
  Eigen::MatrixXd x(idx(n), idx(k));
  for (std::size_t i = 0; i < n; ++i) x.row(idx(i)) = flat.segment(idx(i * k), idx(k)).transpose();
  return x;
}

GeneratedData generate_funnel(Rng& rng) {
  GeneratedData g;
  const double z = sample(normal(0.0, 3.0), rng, 1)[0];
  g.truth["z"] = Eigen::VectorXd::Constant(1, z);
  g.truth["x"] = sample(normal(0.0, std::exp(z / 2.0)), rng, 1);
  return g;
}

GeneratedData generate_blr(const ModelSpec& spec, Rng& rng) {
  GeneratedData g;
  const Eigen::VectorXd alpha = sample(normal(0.0, kBlrAlphaScale), rng, 1);
  const Eigen::VectorXd beta = sample(normal(0.0, kBlrBetaScale), rng, spec.k);
  g.data.x = covariates(spec.n, spec.k, rng);
  Bernoulli<double> lik;
  const Eigen::VectorXd mu = (g.data.x * beta).array() + alpha[0];
  lik.logits.assign(mu.data(), mu.data() + mu.size());
  g.data.y = sample(Distribution<double>(lik), rng, spec.n);
  g.truth["alpha"] = alpha;
  g.truth["beta"] = beta;
  return g;
}

GeneratedData generate_robust(const ModelSpec& spec, Rng& rng) {
  const Hyperparams& h = spec.hyper;
  GeneratedData g;
  const Eigen::VectorXd nu = sample(gamma(kNuShape, kNuRate), rng, 1);
  const Eigen::VectorXd sigma =
      sample(Distribution<double>(Exponential<double>{{1.0 / h.sigma_mean}}), rng, 1);
  const Eigen::VectorXd alpha = sample(normal(0.0, h.alpha_scale), rng, 1);
  const Eigen::VectorXd beta = sample(normal(h.beta_loc, h.beta_scale), rng, spec.k);
  g.data.x = covariates(spec.n, spec.k, rng);
  const Eigen::VectorXd mu = (g.data.x * beta).array() + alpha[0];
  StudentT<double> lik{{nu[0]}, {mu.data(), mu.data() + mu.size()}, {sigma[0]}};
  g.data.y = sample(Distribution<double>(lik), rng, spec.n);
  g.truth["nu"] = nu;
  g.truth["sigma"] = sigma;
  g.truth["alpha"] = alpha;
  g.truth["beta"] = beta;
  return g;
}

Distribution<double> dirichlet_of(const Eigen::VectorXd& a) {
  return Dirichlet<double>{{a.data(), a.data() + a.size()}};
}

GeneratedData generate_annotation(const ModelSpec& spec, Rng& rng) {
  const std::size_t n = spec.n, k = spec.k, c = spec.c;
  const Hyperparams& h = spec.hyper;
  GeneratedData g;
  const Eigen::VectorXd pi =
      sample(dirichlet_of(Eigen::VectorXd::Constant(idx(c), 1.0 / static_cast<double>(c))), rng, c);
  g.truth["pi"] = pi;
  const Eigen::MatrixXd alpha = annotation_alpha(c, h.gamma, h.rho);
  // theta[l * c + m] is labeler l's label distribution for true class m.
  std::vector<Eigen::VectorXd> theta(k * c);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t m = 0; m < c; ++m) {
      theta[l * c + m] = sample(dirichlet_of(alpha.row(idx(m)).transpose()), rng, c);
      g.truth[theta_name(l, m)] = theta[l * c + m];
    }
  }
  const Eigen::VectorXd z =
      sample(Categorical<double>{{pi.data(), pi.data() + pi.size()}, c}, rng, n);
  g.truth["z"] = z;
  const Distribution<double> j_dist = Poisson<double>{{h.j_loc}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto drawn = static_cast<std::size_t>(sample(j_dist, rng, 1)[0]);
    const std::size_t j = std::clamp<std::size_t>(drawn, 1, k);
    g.data.j_sizes.push_back(j);
    for (std::size_t l : sample_without_replacement(k, j, rng)) {
      const Eigen::VectorXd& row = theta[l * c + static_cast<std::size_t>(z[idx(i)])];
      const auto label = static_cast<std::size_t>(
          sample(Categorical<double>{{row.data(), row.data() + row.size()}, c}, rng, 1)[0]);
      g.data.labels.push_back({i, l, label});
    }
  }
  return g;
}

// Per-item (labeler, label) lists.
using ItemLabels = std::vector<std::vector<std::pair<std::size_t, std::size_t>>>;

ItemLabels group_by_item(const std::vector<LabelRow>& labels, std::size_t n) {
  ItemLabels out(n);
  for (const LabelRow& r : labels) {
    if (r.item >= n) throw std::invalid_argument("label row item index out of range");
    out[r.item].emplace_back(r.labeler, r.label);
  }
  return out;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Funnel: return "funnel";
    case ModelKind::Blr: return "blr";
    case ModelKind::Robust: return "robust";
    case ModelKind::Annotation: return "annotation";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  const std::string s = lower(name);
  if (s == "funnel") return ModelKind::Funnel;
  if (s == "blr") return ModelKind::Blr;
  if (s == "robust") return ModelKind::Robust;
  if (s == "annotation") return ModelKind::Annotation;
  throw std::invalid_argument("unknown model: " + name);
}

std::string to_string(EvalMode mode) {
  return mode == EvalMode::ZIntegrated ? "z-integrated" : "conditional";
}

EvalMode parse_eval_mode(const std::string& name) {
  const std::string s = lower(name);
  if (s == "z-integrated" || s == "integrated") return EvalMode::ZIntegrated;
  if (s == "conditional" || s == "conditional-on-z") return EvalMode::ConditionalOnZ;
  throw std::invalid_argument("unknown evaluation mode: " + name);
}

void ModelSpec::validate() const {
  const Hyperparams& h = hyper;
  switch (kind) {
    case ModelKind::Funnel:
      return;
    case ModelKind::Robust:
      if (!(h.sigma_mean > 0) || !(h.alpha_scale > 0) || !(h.beta_scale > 0) ||
          !std::isfinite(h.beta_loc))
        throw std::invalid_argument("robust: hyperparameters must be positive");
      [[fallthrough]];
    case ModelKind::Blr:
      if (n < 1 || k < 1) throw std::invalid_argument("regression models need N, K >= 1");
      return;
    case ModelKind::Annotation:
      if (n < 1 || k < 2 || c < 2)
        throw std::invalid_argument("annotation needs N >= 1, K >= 2 and C >= 2");
      if (!(h.j_loc > 0) || !(h.gamma > 0) || !(h.rho > 0) || !(h.rho < 1))
        throw std::invalid_argument("annotation needs J_loc > 0, gamma > 0 and 0 < rho < 1");
      return;
  }
}

std::size_t Dataset::rows() const {
  return labels.empty() ? static_cast<std::size_t>(y.size()) : labels.size();
}

Eigen::MatrixXd annotation_alpha(std::size_t c, double gamma, double rho) {
  if (c < 2) throw std::invalid_argument("annotation_alpha: C must be at least 2");
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Constant(idx(c), idx(c), gamma * (1.0 - rho) / static_cast<double>(c - 1));
  a.diagonal().setConstant(gamma * rho);
  return a;
}

GeneratedData generate(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::Funnel: return generate_funnel(rng);
    case ModelKind::Blr: return generate_blr(spec, rng);
    case ModelKind::Robust: return generate_robust(spec, rng);
    case ModelKind::Annotation: return generate_annotation(spec, rng);
  }
  throw std::logic_error("generate: unhandled model");
}

std::pair<Dataset, Dataset> split_rows(const Dataset& data, double holdout_fraction, Rng& rng) {
  if (!(holdout_fraction > 0 && holdout_fraction < 1))
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  const std::size_t rows = data.rows();
  const auto held = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(rows)));
  std::vector<std::size_t> pick = sample_without_replacement(rows, std::min(held, rows), rng);
  std::vector<bool> is_held(rows, false);
  for (std::size_t r : pick) is_held[r] = true;
  std::vector<std::size_t> train_rows, held_rows;
  for (std::size_t r = 0; r < rows; ++r) (is_held[r] ? held_rows : train_rows).push_back(r);
  return {select_rows(data, train_rows), select_rows(data, held_rows)};
}

Split generate_and_split(const ModelSpec& spec, Rng& rng, double holdout_fraction) {
  GeneratedData g = generate(spec, rng);
  if (spec.kind == ModelKind::Funnel) return {g.data, Dataset{}, std::move(g.truth)};
  auto [train, heldout] = split_rows(g.data, holdout_fraction, rng);
  return {std::move(train), std::move(heldout), std::move(g.truth)};
}

Model build_funnel() {
  std::vector<NodeSpec> specs;
  specs.push_back(scalar_normal("z", 0.0, 3.0));
  specs.push_back({"x", {"z"}, Support::real(), 1, [](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return normal<T>(T(0.0), exp(p.scalar(0) * 0.5));
                   }});
  return build_model(std::move(specs));
}

Model build_blr(const Dataset& train) {
  const auto n = static_cast<std::size_t>(train.x.rows());
  const auto k = static_cast<std::size_t>(train.x.cols());
  if (n == 0 || k == 0 || train.y.size() != train.x.rows())
    throw std::invalid_argument("build_blr: need matching nonempty X and Y");
  std::vector<NodeSpec> specs;
  specs.push_back(scalar_normal("alpha", 0.0, kBlrAlphaScale));
  specs.push_back(scalar_normal("beta", 0.0, kBlrBetaScale, k));
  specs.push_back(covariate_node(train.x));
  specs.push_back({"Y", {"alpha", "beta", "X"}, Support::categorical(2), n,
                   [n, k](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return Distribution<T>(Bernoulli<T>{linear_predictor(p, n, k)});
                   },
                   train.y});
  return build_model(std::move(specs));
}

Model build_robust(const Dataset& train, const Hyperparams& hyper) {
  const auto n = static_cast<std::size_t>(train.x.rows());
  const auto k = static_cast<std::size_t>(train.x.cols());
  if (n == 0 || k == 0 || train.y.size() != train.x.rows())
    throw std::invalid_argument("build_robust: need matching nonempty X and Y");
  std::vector<NodeSpec> specs;
  specs.push_back({"nu", {}, Support::positive(), 1, [](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return gamma<T>(T(kNuShape), T(kNuRate));
                   }});
  const double sigma_rate = 1.0 / hyper.sigma_mean;
  specs.push_back({"sigma", {}, Support::positive(), 1, [sigma_rate](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return Distribution<T>(Exponential<T>{{T(sigma_rate)}});
                   }});
  specs.push_back(scalar_normal("alpha", 0.0, hyper.alpha_scale));
  specs.push_back(scalar_normal("beta", hyper.beta_loc, hyper.beta_scale, k));
  specs.push_back(covariate_node(train.x));
  specs.push_back({"Y", {"alpha", "beta", "X", "nu", "sigma"}, Support::real(), n,
                   [n, k](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return Distribution<T>(
                         StudentT<T>{{p.scalar(3)}, linear_predictor(p, n, k), {p.scalar(4)}});
                   },
                   train.y});
  return build_model(std::move(specs));
}

Model build_annotation(const Dataset& train, std::size_t n, std::size_t k, std::size_t c,
                       const Hyperparams& hyper) {
  ModelSpec check{ModelKind::Annotation, n, k, c, hyper};
  check.validate();
  if (train.j_sizes.size() != n) throw std::invalid_argument("build_annotation: j_sizes must have N entries");
  const ItemLabels items = group_by_item(train.labels, n);

  std::vector<NodeSpec> specs;
  const double pi_conc = 1.0 / static_cast<double>(c);
  specs.push_back({"pi", {}, Support::simplex(c), c, [c, pi_conc](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return Distribution<T>(Dirichlet<T>{std::vector<T>(c, T(pi_conc))});
                   }});
  const Eigen::MatrixXd alpha = annotation_alpha(c, hyper.gamma, hyper.rho);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t m = 0; m < c; ++m) {
      std::vector<double> a(c);
      for (std::size_t j = 0; j < c; ++j) a[j] = alpha(idx(m), idx(j));
      specs.push_back({theta_name(l, m), {}, Support::simplex(c), c, [a](const auto& p) {
                         using T = scalar_of<decltype(p)>;
                         return Distribution<T>(Dirichlet<T>{std::vector<T>(a.begin(), a.end())});
                       }});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    specs.push_back({z_name(i), {"pi"}, Support::categorical(c), 1, [c](const auto& p) {
                       using T = scalar_of<decltype(p)>;
                       const auto probs = p[0];
                       return Distribution<T>(Categorical<T>{std::vector<T>(probs.begin(), probs.end()), c});
                     }});
  }
  Eigen::VectorXd j_obs(idx(n));
  for (std::size_t i = 0; i < n; ++i) j_obs[idx(i)] = static_cast<double>(train.j_sizes[i]);
  const double j_loc = hyper.j_loc;
  specs.push_back({"J", {}, Support::nonnegative_integer(), n,
                   [j_loc](const auto& p) {
                     using T = scalar_of<decltype(p)>;
                     return Distribution<T>(Poisson<T>{{T(j_loc)}});
                   },
                   j_obs});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rows = items[i];
    if (rows.empty()) continue;
    std::vector<std::string> parents{z_name(i)};
    Eigen::VectorXd y(idx(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      for (std::size_t m = 0; m < c; ++m) parents.push_back(theta_name(rows[j].first, m));
      y[idx(j)] = static_cast<double>(rows[j].second);
    }
    const std::size_t count = rows.size();
    // Row j of the categorical is theta_{l_j, z_i}; parent 1 + j*C + m is theta_{l_j, m}.
    specs.push_back({"y_" + std::to_string(i), std::move(parents), Support::categorical(c), count,
                     [count, c](const auto& p) {
                       using T = scalar_of<decltype(p)>;
                       const auto z = static_cast<std::size_t>(value_of(p.scalar(0)));
                       Categorical<T> d;
                       d.classes = c;
                       d.probs.reserve(count * c);
                       for (std::size_t j = 0; j < count; ++j) {
                         const auto row = p[1 + j * c + z];
                         d.probs.insert(d.probs.end(), row.begin(), row.end());
                       }
                       return Distribution<T>(std::move(d));
                     },
                     y});
  }
  return build_model(std::move(specs));
}

Model build(const ModelSpec& spec, const Dataset& train) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::Funnel: return build_funnel();
    case ModelKind::Blr: return build_blr(train);
    case ModelKind::Robust: return build_robust(train, spec.hyper);
    case ModelKind::Annotation: return build_annotation(train, spec.n, spec.k, spec.c, spec.hyper);
  }
  throw std::logic_error("build: unhandled model");
}

std::vector<double> heldout_log_likelihood(const ModelSpec& spec, const Dataset& train,
                                           const Dataset& heldout, const Trace& trace,
                                           EvalMode mode) {
  const std::size_t samples = trace.num_samples();
  std::vector<double> out(samples, 0.0);
  switch (spec.kind) {
    case ModelKind::Funnel:
      throw std::invalid_argument("heldout_log_likelihood: the funnel has no data");
    case ModelKind::Blr: {
      const std::size_t ka = trace.index("alpha"), kb = trace.index("beta");
      for (std::size_t t = 0; t < samples; ++t) {
        const Eigen::VectorXd mu = (heldout.x * trace.value(kb, t)).array() + trace.value(ka, t)[0];
        double ll = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
          ll += log_sigmoid(heldout.y[i] > 0.5 ? mu[i] : -mu[i]);
        out[t] = ll;
      }
      return out;
    }
    case ModelKind::Robust: {
      const std::size_t ka = trace.index("alpha"), kb = trace.index("beta");
      const std::size_t kn = trace.index("nu"), ks = trace.index("sigma");
      const std::vector<double> y(heldout.y.data(), heldout.y.data() + heldout.y.size());
      for (std::size_t t = 0; t < samples; ++t) {
        const Eigen::VectorXd mu = (heldout.x * trace.value(kb, t)).array() + trace.value(ka, t)[0];
        const StudentT<double> lik{{trace.value(kn, t)[0]},
                                   {mu.data(), mu.data() + mu.size()},
                                   {trace.value(ks, t)[0]}};
        out[t] = log_density(lik, std::span<const double>(y));
      }
      return out;
    }
    case ModelKind::Annotation:
      break;
  }

  const std::size_t n = spec.n, k = spec.k, c = spec.c;
  const ItemLabels train_items = group_by_item(train.labels, n);
  const ItemLabels held_items = group_by_item(heldout.labels, n);
  std::vector<std::size_t> theta_index(k * c), z_index;
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t m = 0; m < c; ++m) theta_index[l * c + m] = trace.index(theta_name(l, m));
  const std::size_t pi_index = trace.index("pi");
  std::vector<std::size_t> held_list;
  for (std::size_t i = 0; i < n; ++i) {
    if (!held_items[i].empty()) held_list.push_back(i);
    z_index.push_back(mode == EvalMode::ConditionalOnZ ? trace.index(z_name(i)) : 0);
  }

  std::vector<Eigen::VectorXd> log_theta(k * c);
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t j = 0; j < k * c; ++j)
      log_theta[j] = trace.samples[theta_index[j]].row(idx(t)).transpose().array().log();
    const Eigen::VectorXd log_pi = trace.samples[pi_index].row(idx(t)).transpose().array().log();
    double ll = 0.0;
    for (std::size_t i : held_list) {
      if (mode == EvalMode::ConditionalOnZ) {
        const auto z = static_cast<std::size_t>(trace.samples[z_index[i]](idx(t), 0));
        for (const auto& [l, y] : held_items[i]) ll += log_theta[l * c + z][idx(y)];
        continue;
      }
      // log p(z_i = m | pi, theta, training labels) + log p(heldout labels | z_i = m)
      Eigen::VectorXd prior = log_pi, joint(idx(c));
      for (std::size_t m = 0; m < c; ++m) {
        for (const auto& [l, y] : train_items[i]) prior[idx(m)] += log_theta[l * c + m][idx(y)];
        double held = 0.0;
        for (const auto& [l, y] : held_items[i]) held += log_theta[l * c + m][idx(y)];
        joint[idx(m)] = prior[idx(m)] + held;
      }
      ll += log_sum_exp(joint) - log_sum_exp(prior);
    }
    out[t] = ll;
  }
  return out;
}

std::vector<std::size_t> posterior_mode_z(const Trace& trace, std::size_t n, double burn_fraction) {
  const std::size_t samples = trace.num_samples();
  auto start = static_cast<std::size_t>(std::floor(burn_fraction * static_cast<double>(samples)));
  if (start >= samples) start = 0;
  std::vector<std::size_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd& s = trace.samples.at(trace.index(z_name(i)));
    std::vector<std::size_t> counts;
    for (std::size_t t = start; t < samples; ++t) {
      const auto z = static_cast<std::size_t>(s(idx(t), 0));
      if (z >= counts.size()) counts.resize(z + 1, 0);
      ++counts[z];
    }
    if (!counts.empty())
      out[i] = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) -
                                        counts.begin());
  }
  return out;
}

std::vector<std::size_t> majority_vote(const std::vector<LabelRow>& labels, std::size_t n,
                                       std::size_t c) {
  std::vector<std::size_t> global(c, 0);
  std::vector<std::vector<std::size_t>> per_item(n, std::vector<std::size_t>(c, 0));
  for (const LabelRow& r : labels) {
    if (r.item >= n || r.label >= c) throw std::invalid_argument("majority_vote: row out of range");
    ++global[r.label];
    ++per_item[r.item][r.label];
  }
  const auto better = [&](const std::vector<std::size_t>& counts, std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    if (global[a] != global[b]) return global[a] > global[b];
    return a < b;
  };
  std::vector<std::size_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < c; ++m)
      if (better(per_item[i], m, best)) best = m;
    out[i] = best;
  }
  return out;
}

double accuracy(const std::vector<std::size_t>& predicted, const Eigen::VectorXd& truth) {
  if (predicted.empty() || predicted.size() != static_cast<std::size_t>(truth.size()))
    throw std::invalid_argument("accuracy: size mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    hits += predicted[i] == static_cast<std::size_t>(truth[idx(i)]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace nmc
