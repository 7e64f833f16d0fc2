#include "gpool/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gpool {

static_assert(std::endian::native == std::endian::little,
              "weight blobs are little-endian; byte swapping is not implemented");

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  write_text_file(path, matrix_to_csv(m));
}

Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t col_start = 0;
    std::size_t field_no = 0;
    while (col_start <= line.size()) {
      ++field_no;
      std::size_t comma = line.find(',', col_start);
      if (comma == std::string::npos) comma = line.size();
      const std::string field = line.substr(col_start, comma - col_start);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ":" +
                                 std::to_string(col_start + 1) + ": expected a number, got '" +
                                 field + "'");
      }
      row.push_back(v);
      col_start = comma + 1;
      if (comma == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ":1: row has " + std::to_string(row.size()) +
                               " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(origin + ":1:1: empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  return parse_matrix_csv(read_text_file(path), path);
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw std::runtime_error(path + ": expected a single row or a single column");
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v) {
  write_matrix_csv(path, v);
}

nlohmann::json graphon_to_json(const Graphon& g) {
  nlohmann::json j;
  if (g.is_step()) {
    j["breakpoints"] = g.partition().breakpoints();
    auto values = nlohmann::json::array();
    for (Eigen::Index i = 0; i < g.values().rows(); ++i) {
      auto row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < g.values().cols(); ++c) row.push_back(g.values()(i, c));
      values.push_back(std::move(row));
    }
    j["values"] = std::move(values);
  } else {
    j["family"] = family_name(g.family());
    j["params"] = g.params();
  }
  return j;
}

Graphon graphon_from_json(const nlohmann::json& j) {
  if (j.contains("breakpoints")) {
    const auto bp = j.at("breakpoints").get<std::vector<double>>();
    const auto& rows = j.at("values");
    Eigen::MatrixXd v(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row = rows[i].get<std::vector<double>>();
      if (row.size() != rows.size()) throw std::runtime_error("step graphon values must be square");
      for (std::size_t c = 0; c < row.size(); ++c)
        v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
    return Graphon::step(Partition::from_breakpoints(bp), v);
  }
  const std::string family = j.at("family").get<std::string>();
  std::vector<double> params;
  if (j.contains("params")) params = j.at("params").get<std::vector<double>>();
  if (family == "exponential") return Graphon::closed_form(GraphonFamily::Exponential, params);
  if (family == "bilinear") return Graphon::closed_form(GraphonFamily::Bilinear, params);
  if (family == "polynomial") return Graphon::closed_form(GraphonFamily::Polynomial, params);
  if (family == "logmax") return Graphon::closed_form(GraphonFamily::LogMax, params);
  if (family == "absolute") return Graphon::closed_form(GraphonFamily::Absolute, params);
  throw std::runtime_error("unknown graphon family: " + family);
}

Graphon parse_graphon_spec(const std::string& spec) {
  if (spec.rfind("exp:", 0) == 0) {
    char* end = nullptr;
    const std::string arg = spec.substr(4);
    const double beta = std::strtod(arg.c_str(), &end);
    if (end == arg.c_str() || *end != '\0')
      throw std::invalid_argument("bad exponential graphon parameter: " + spec);
    return Graphon::exponential(beta);
  }
  if (spec == "bilinear") return Graphon::bilinear();
  if (spec == "poly") return Graphon::polynomial();
  if (spec == "logmax") return Graphon::logmax();
  if (spec == "absdiff") return Graphon::absolute();
  if (spec.rfind("step:", 0) == 0) {
    const std::string path = spec.substr(5);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
      return graphon_from_json(nlohmann::json::parse(read_text_file(path)));
    }
    return Graphon::induced(read_matrix_csv(path));
  }
  throw std::invalid_argument(
      "unknown graphon spec '" + spec +
      "' (expected exp:<beta>, bilinear, poly, logmax, absdiff, or step:<path>)");
}

void write_plan(const std::string& json_path, const PoolingPlan& plan) {
  const std::filesystem::path jp(json_path);
  const std::string stem = jp.stem().string();
  nlohmann::json j;
  j["method"] = method_name(plan.method);
  j["sizes"] = plan.sizes;
  j["seed"] = plan.seed;
  if (!plan.warnings.empty()) j["warnings"] = plan.warnings;
  auto layers = nlohmann::json::array();
  for (int l = 0; l < plan.layer_count(); ++l) {
    const PoolingLayer& layer = plan.layers[static_cast<std::size_t>(l)];
    const std::string csv_name = stem + "_layer" + std::to_string(l) + ".csv";
    write_matrix_csv((jp.parent_path() / csv_name).string(), layer.adjacency);
    nlohmann::json lj;
    lj["adjacency_csv"] = csv_name;
    if (plan.method == PoolingMethod::M3) {
      lj["points"] = layer.points.points;
    } else {
      lj["breakpoints"] = layer.partition.breakpoints();
    }
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  write_text_file(json_path, j.dump(2) + "\n");
}

PoolingPlan read_plan(const std::string& json_path) {
  const std::filesystem::path jp(json_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(json_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(json_path + ": " + e.what());
  }
  PoolingPlan plan;
  plan.method = parse_method(j.at("method").get<std::string>());
  plan.sizes = j.at("sizes").get<std::vector<int>>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("warnings")) plan.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& lj : j.at("layers")) {
    PoolingLayer layer;
    layer.adjacency = read_matrix_csv((jp.parent_path() / lj.at("adjacency_csv").get<std::string>()).string());
    if (plan.method == PoolingMethod::M3) {
      layer.points = SamplePoints::from_points(lj.at("points").get<std::vector<double>>());
    } else {
      layer.partition = Partition::from_breakpoints(lj.at("breakpoints").get<std::vector<double>>());
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

namespace {

void append_tensor(std::vector<double>& blob, nlohmann::json& tensors, const std::string& name,
                   const Eigen::MatrixXd& m) {
  nlohmann::json t;
  t["name"] = name;
  t["shape"] = {m.rows(), m.cols()};
  t["offset"] = blob.size();
  tensors.push_back(std::move(t));
  // Row-major serialization.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) blob.push_back(m(i, j));
  }
}

Eigen::MatrixXd take_tensor(const std::vector<double>& blob, const nlohmann::json& t) {
  const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
  const auto offset = t.at("offset").get<std::size_t>();
  if (shape.size() != 2) throw std::runtime_error("weight tensor shape must be 2-d");
  Eigen::MatrixXd m(shape[0], shape[1]);
  std::size_t pos = offset;
  if (offset + static_cast<std::size_t>(m.size()) > blob.size())
    throw std::runtime_error("weight blob too short for manifest");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = blob[pos++];
  }
  return m;
}

}  // namespace

void write_weights(const std::string& bin_path, const std::string& manifest_path,
                   const GnnWeights& w) {
  std::vector<double> blob;
  nlohmann::json tensors = nlohmann::json::array();
  for (std::size_t l = 0; l < w.taps.size(); ++l) {
    for (std::size_t k = 0; k < w.taps[l].size(); ++k) {
      append_tensor(blob, tensors, "layer" + std::to_string(l) + ".tap" + std::to_string(k),
                    w.taps[l][k]);
    }
  }
  append_tensor(blob, tensors, "readout.weight", w.readout_weight);
  append_tensor(blob, tensors, "readout.bias", w.readout_bias);

  nlohmann::json manifest;
  manifest["dtype"] = "float64";
  manifest["byte_order"] = "little";
  manifest["layer_count"] = w.taps.size();
  auto tap_counts = nlohmann::json::array();
  for (const auto& layer : w.taps) tap_counts.push_back(layer.size());
  manifest["tap_counts"] = std::move(tap_counts);
  manifest["tensors"] = std::move(tensors);
  write_text_file(manifest_path, manifest.dump(2) + "\n");

  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin_path);
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(double)));
}

GnnWeights read_weights(const std::string& bin_path, const std::string& manifest_path) {
  const nlohmann::json manifest = nlohmann::json::parse(read_text_file(manifest_path));
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + bin_path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % sizeof(double) != 0)
    throw std::runtime_error(bin_path + ": size is not a multiple of 8");
  std::vector<double> blob(bytes.size() / sizeof(double));
  std::memcpy(blob.data(), bytes.data(), bytes.size());

  GnnWeights w;
  const auto layer_count = manifest.at("layer_count").get<std::size_t>();
  const auto tap_counts = manifest.at("tap_counts").get<std::vector<std::size_t>>();
  const auto& tensors = manifest.at("tensors");
  std::size_t next = 0;
  w.taps.resize(layer_count);
  for (std::size_t l = 0; l < layer_count; ++l) {
    for (std::size_t k = 0; k < tap_counts[l]; ++k) w.taps[l].push_back(take_tensor(blob, tensors[next++]));
  }
  w.readout_weight = take_tensor(blob, tensors[next++]);
  w.readout_bias = take_tensor(blob, tensors[next++]).col(0);
  return w;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gpool
