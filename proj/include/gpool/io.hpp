#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "gpool/gnn.hpp"
#include "gpool/graphon.hpp"
#include "gpool/pooling.hpp"

namespace gpool {

// 17 significant digits: round-trip safe for 64-bit floats.
std::string format_double(double v);

std::string matrix_to_csv(const Eigen::MatrixXd& m);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Strict CSV: rectangular, numeric fields only. Parse failures report
// "<origin>:<line>:<column>".
Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& origin = "csv");
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// A vector stored either as a single column or a single row.
Eigen::VectorXd read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v);

nlohmann::json graphon_to_json(const Graphon& g);
Graphon graphon_from_json(const nlohmann::json& j);

// Mini-language: exp:<beta> | bilinear | poly | logmax | absdiff |
// step:<path> (CSV adjacency or step-graphon JSON).
Graphon parse_graphon_spec(const std::string& spec);

// Plan JSON embeds per-layer adjacency CSV references; the CSVs are written
// next to the JSON as <stem>_layer<i>.csv.
void write_plan(const std::string& json_path, const PoolingPlan& plan);
PoolingPlan read_plan(const std::string& json_path);

// Flat little-endian float64 blob plus a JSON shape manifest.
void write_weights(const std::string& bin_path, const std::string& manifest_path,
                   const GnnWeights& w);
GnnWeights read_weights(const std::string& bin_path, const std::string& manifest_path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// FNV-1a, used for config hashes in run manifests.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace gpool
