#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrnet/generate.hpp"
#include "corrnet/reconstruct.hpp"
#include "corrnet/spectral.hpp"

namespace corrnet {

inline constexpr const char* kVersion = "0.1.0";

// Frequency given as a rational multiple of pi: "3/8" -> 3 pi / 8, "1" -> pi.
struct RationalPi {
  long num = 0;
  long den = 1;

  double value() const { return kPi * static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

RationalPi parse_rational_pi(const std::string& text);

// FNV-1a over the canonical JSON dump.
std::string config_hash(const nlohmann::json& config);

// Provenance block embedded in every artifact.
nlohmann::json artifact_meta(std::uint64_t seed, const nlohmann::json& config);
std::string csv_meta_line(const nlohmann::json& meta);

// Model document: {n, edges:[{from,to,taps}], noise:{base_variances, kind, latents | m,p,sigma,gains}}.
nlohmann::json model_to_json(const Ldim& model);
Ldim model_from_json(const nlohmann::json& doc);

// Generated benchmark plus its ground truth (topology, correlation graph, generator record).
nlohmann::json benchmark_to_json(const GeneratedModel& gm, const nlohmann::json& meta);

struct LoadedModel {
  Ldim model;
  std::optional<Topology> topology;
  std::optional<CorrelationGraph> correlation;
  nlohmann::json meta;
};

LoadedModel load_model(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& doc);

nlohmann::json graph_to_json(const UndirectedGraph& g);
UndirectedGraph graph_from_json(Index n, const nlohmann::json& edges);

void write_sweep_csv(std::ostream& os, const SweepResult& sr, const nlohmann::json& meta);
void write_matrix_csv(std::ostream& os, const Matrix& m, const nlohmann::json& meta);
void write_edges_csv(std::ostream& os, const UndirectedGraph& g, const nlohmann::json& meta);

// One row per node.
void write_series_csv(std::ostream& os, const TimeSeries& x);
TimeSeries read_series_csv(std::istream& is);
// Little-endian block: int64 n, int64 N, then n*N float64 row-major.
void write_series_binary(std::ostream& os, const TimeSeries& x);
TimeSeries read_series_binary(std::istream& is);

nlohmann::json spectral_to_json(const SpectralEstimate& est);

nlohmann::json report_to_json(const ReconstructionReport& rep);

// Parsed sweep CSV (for plotting).
struct SweepTable {
  std::vector<double> t, diff;
  std::vector<std::optional<double>> tol;
  double c_norm = 0;
};

SweepTable read_sweep_csv(std::istream& is);

}  // namespace corrnet
