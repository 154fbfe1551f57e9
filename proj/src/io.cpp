#include "nmc/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace nmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string format(double v, ColumnType type) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  if (type == ColumnType::Int) {
    os << static_cast<long long>(std::llround(v));
  } else {
    os << std::setprecision(17) << v;
  }
  return os.str();
}

double parse_cell(const std::string& cell, const fs::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + cell + "'");
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return in;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Table dataset_table(const ModelSpec& spec, const Dataset& d) {
  Table t;
  if (spec.kind == ModelKind::Annotation) {
    std::vector<double> item, labeler, label;
    for (const LabelRow& r : d.labels) {
      item.push_back(static_cast<double>(r.item));
      labeler.push_back(static_cast<double>(r.labeler));
      label.push_back(static_cast<double>(r.label));
    }
    t.add("item", ColumnType::Int, item);
    t.add("labeler", ColumnType::Int, labeler);
    t.add("label", ColumnType::Int, label);
    return t;
  }
  for (Eigen::Index j = 0; j < d.x.cols(); ++j)
    t.add("x" + std::to_string(j), ColumnType::Real, to_vector(d.x.col(j)));
  t.add("y", spec.kind == ModelKind::Blr ? ColumnType::Int : ColumnType::Real, to_vector(d.y));
  return t;
}

Dataset dataset_from_table(const ModelSpec& spec, const Table& t,
                           const std::vector<std::size_t>& j_sizes) {
  Dataset d;
  d.j_sizes = j_sizes;
  if (spec.kind == ModelKind::Annotation) {
    const auto& item = t.column("item");
    const auto& labeler = t.column("labeler");
    const auto& label = t.column("label");
    for (std::size_t r = 0; r < t.rows(); ++r)
      d.labels.push_back({static_cast<std::size_t>(item[r]), static_cast<std::size_t>(labeler[r]),
                          static_cast<std::size_t>(label[r])});
    return d;
  }
  const auto rows = static_cast<Eigen::Index>(t.rows());
  d.x.resize(rows, static_cast<Eigen::Index>(spec.k));
  for (std::size_t j = 0; j < spec.k; ++j) d.x.col(static_cast<Eigen::Index>(j)) = to_eigen(t.column("x" + std::to_string(j)));
  d.y = to_eigen(t.column("y"));
  return d;
}

}  // namespace

void Table::add(std::string name, ColumnType type, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows())
    throw std::invalid_argument("Table: column '" + name + "' has the wrong length");
  names.push_back(std::move(name));
  types.push_back(type);
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw IoError("missing column '" + name + "'");
}

void write_table(const fs::path& path, const Table& table) {
  std::ofstream out = open_out(path);
  for (std::size_t j = 0; j < table.names.size(); ++j)
    out << (j ? "," : "") << table.names[j] << (table.types[j] == ColumnType::Int ? ":int" : ":real");
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      out << (j ? "," : "") << format(table.columns[j][r], table.types[j]);
    out << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

Table read_table(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  Table t;
  for (const std::string& cell : split_csv(line)) {
    const auto colon = cell.rfind(':');
    if (colon == std::string::npos) throw IoError(path.string() + ": untyped column '" + cell + "'");
    const std::string type = cell.substr(colon + 1);
    if (type != "real" && type != "int")
      throw IoError(path.string() + ": unknown column type '" + type + "'");
    t.names.push_back(cell.substr(0, colon));
    t.types.push_back(type == "int" ? ColumnType::Int : ColumnType::Real);
    t.columns.emplace_back();
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.names.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.names.size()) + " cells");
    for (std::size_t j = 0; j < cells.size(); ++j) t.columns[j].push_back(parse_cell(cells[j], path, lineno));
  }
  return t;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path.string() + ": write failed");
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

json to_json(const ModelSpec& spec) {
  const Hyperparams& h = spec.hyper;
  json j;
  j["model"] = to_string(spec.kind);
  j["sizes"] = {{"N", spec.n}, {"K", spec.k}, {"C", spec.c}};
  j["hyperparams"] = {{"sigma_mean", h.sigma_mean}, {"alpha_scale", h.alpha_scale},
                      {"beta_loc", h.beta_loc},     {"beta_scale", h.beta_scale},
                      {"J_loc", h.j_loc},           {"gamma", h.gamma},
                      {"rho", h.rho}};
  return j;
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.kind = parse_model_kind(j.at("model").get<std::string>());
  if (j.contains("sizes")) {
    const json& s = j.at("sizes");
    spec.n = s.value("N", std::size_t{0});
    spec.k = s.value("K", std::size_t{0});
    spec.c = s.value("C", std::size_t{0});
  }
  if (spec.kind == ModelKind::Annotation) {
    // Declared defaults for the annotation sizes.
    if (spec.k == 0) spec.k = 100;
    if (spec.c == 0) spec.c = 3;
  }
  if (j.contains("hyperparams")) {
    const json& h = j.at("hyperparams");
    Hyperparams& out = spec.hyper;
    out.sigma_mean = h.value("sigma_mean", out.sigma_mean);
    out.alpha_scale = h.value("alpha_scale", out.alpha_scale);
    out.beta_loc = h.value("beta_loc", out.beta_loc);
    out.beta_scale = h.value("beta_scale", out.beta_scale);
    out.j_loc = h.value("J_loc", out.j_loc);
    out.gamma = h.value("gamma", out.gamma);
    out.rho = h.value("rho", out.rho);
  }
  spec.validate();
  return spec;
}

void write_dataset(const fs::path& dir, const StoredDataset& data) {
  json meta = to_json(data.spec);
  meta["seed"] = data.seed;
  meta["holdout_fraction"] = data.holdout_fraction;
  meta["files"] = {{"train", "train.csv"}, {"heldout", "heldout.csv"}};
  meta["rows"] = {{"train", data.split.train.rows()}, {"heldout", data.split.heldout.rows()}};
  if (data.spec.kind == ModelKind::Annotation) {
    meta["bindings"] = {{"y", {"item", "labeler", "label"}}, {"J", "j_sizes"}};
    meta["j_sizes"] = data.split.train.j_sizes;
  } else if (data.spec.kind != ModelKind::Funnel) {
    std::vector<std::string> xs;
    for (std::size_t j = 0; j < data.spec.k; ++j) xs.push_back("x" + std::to_string(j));
    meta["bindings"] = {{"X", xs}, {"Y", "y"}};
  }
  json truth = json::object();
  for (const auto& [name, v] : data.split.truth) truth[name] = to_vector(v);
  meta["truth"] = truth;
  write_json(dir / "dataset.json", meta);
  if (data.spec.kind != ModelKind::Funnel) {
    write_table(dir / "train.csv", dataset_table(data.spec, data.split.train));
    write_table(dir / "heldout.csv", dataset_table(data.spec, data.split.heldout));
  }
}

StoredDataset read_dataset(const fs::path& dir) {
  const json meta = read_json(dir / "dataset.json");
  StoredDataset out;
  try {
    out.spec = model_spec_from_json(meta);
    out.seed = meta.value("seed", std::uint64_t{0});
    out.holdout_fraction = meta.value("holdout_fraction", 0.5);
    for (const auto& [name, v] : meta.at("truth").items())
      out.split.truth[name] = to_eigen(v.get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw IoError((dir / "dataset.json").string() + ": " + e.what());
  }
  if (out.spec.kind == ModelKind::Funnel) return out;
  const auto j_sizes = meta.value("j_sizes", std::vector<std::size_t>{});
  out.split.train = dataset_from_table(out.spec, read_table(dir / "train.csv"), j_sizes);
  out.split.heldout = dataset_from_table(out.spec, read_table(dir / "heldout.csv"), j_sizes);
  return out;
}

std::vector<std::string> coordinate_names(const std::string& node, std::size_t dim) {
  if (dim == 1) return {node};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(node + "[" + std::to_string(i) + "]");
  return out;
}

void write_trace(const fs::path& dir, const Trace& trace) {
  const std::size_t n = trace.num_samples();
  Table diag;
  std::vector<double> index(n), accepted(n), proposals(n), fallbacks(n);
  for (std::size_t t = 0; t < n; ++t) {
    index[t] = static_cast<double>(t + 1);
    accepted[t] = static_cast<double>(trace.accepted[t]);
    proposals[t] = static_cast<double>(trace.proposals[t]);
    fallbacks[t] = static_cast<double>(trace.fallbacks[t]);
  }
  diag.add("sample", ColumnType::Int, index);
  diag.add("seconds", ColumnType::Real, trace.seconds);
  diag.add("log_prob", ColumnType::Real, trace.log_prob);
  diag.add("accepted", ColumnType::Int, accepted);
  diag.add("proposals", ColumnType::Int, proposals);
  diag.add("fallbacks", ColumnType::Int, fallbacks);
  write_table(dir / "trace.csv", diag);

  json nodes = json::array();
  for (std::size_t k = 0; k < trace.names.size(); ++k) {
    const Eigen::MatrixXd& s = trace.samples[k];
    nodes.push_back({{"name", trace.names[k]}, {"id", trace.nodes[k]}, {"dim", s.cols()}});
    Table t;
    const auto cols = coordinate_names(trace.names[k], static_cast<std::size_t>(s.cols()));
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      t.add(cols[static_cast<std::size_t>(j)], ColumnType::Real, to_vector(s.col(j)));
    write_table(dir / "samples" / (trace.names[k] + ".csv"), t);
  }
  write_json(dir / "samples" / "nodes.json", nodes);
}

Trace read_trace(const fs::path& dir) {
  Trace trace;
  const Table diag = read_table(dir / "trace.csv");
  trace.seconds = diag.column("seconds");
  trace.log_prob = diag.column("log_prob");
  for (double v : diag.column("accepted")) trace.accepted.push_back(static_cast<std::size_t>(v));
  for (double v : diag.column("proposals")) trace.proposals.push_back(static_cast<std::size_t>(v));
  for (double v : diag.column("fallbacks")) trace.fallbacks.push_back(static_cast<std::size_t>(v));
  const json nodes = read_json(dir / "samples" / "nodes.json");
  for (const json& node : nodes) {
    const auto name = node.at("name").get<std::string>();
    const Table t = read_table(dir / "samples" / (name + ".csv"));
    if (t.rows() != trace.num_samples())
      throw IoError((dir / "samples" / (name + ".csv")).string() + ": row count differs from trace.csv");
    Eigen::MatrixXd s(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.columns.size()));
    for (std::size_t j = 0; j < t.columns.size(); ++j) s.col(static_cast<Eigen::Index>(j)) = to_eigen(t.columns[j]);
    trace.names.push_back(name);
    trace.nodes.push_back(node.at("id").get<NodeId>());
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

}  // namespace nmc
