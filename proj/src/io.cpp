#include "corrnet/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

namespace corrnet {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

long gcd(long a, long b) { return b == 0 ? std::abs(a) : gcd(b, a % b); }

json taps_json(const TransferFunction& tf) { return tf.taps(); }

TransferFunction taps_from(const json& j) { return TransferFunction(j.get<std::vector<double>>()); }

}  // namespace

std::string RationalPi::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

RationalPi parse_rational_pi(const std::string& text) {
  RationalPi r;
  auto slash = text.find('/');
  auto parse = [&](const std::string& s, long& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, out);
    if (s.empty() || res.ec != std::errc() || res.ptr != e)
      throw ValidationError("frequency must be a rational multiple of pi such as 3/8, got '" + text + "'");
  };
  parse(text.substr(0, slash), r.num);
  if (slash != std::string::npos) parse(text.substr(slash + 1), r.den);
  if (r.den <= 0) throw ValidationError("frequency denominator must be positive");
  long g = gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  if (!(r.value() > -kPi && r.value() <= kPi + 1e-15)) throw ValidationError("frequency must lie in (-pi, pi]");
  return r;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

json artifact_meta(std::uint64_t seed, const json& config) {
  return {{"seed", seed}, {"config_hash", config_hash(config)}, {"version", kVersion}, {"config", config}};
}

std::string csv_meta_line(const json& meta) {
  std::string s = "# corrnet " + meta.value("version", std::string(kVersion));
  if (meta.contains("seed")) s += " seed=" + std::to_string(meta["seed"].get<std::uint64_t>());
  if (meta.contains("config_hash")) s += " config_hash=" + meta["config_hash"].get<std::string>();
  return s;
}

json model_to_json(const Ldim& model) {
  json doc;
  doc["format"] = "corrnet-model";
  doc["n"] = model.n();
  json edges = json::array();
  for (Index i = 0; i < model.n(); ++i)
    for (Index j = 0; j < model.n(); ++j)
      if (!model.h().is_zero_entry(i, j)) edges.push_back({{"from", j}, {"to", i}, {"taps", taps_json(model.h().entry(i, j))}});
  doc["edges"] = edges;
  json noise;
  noise["base_variances"] = std::vector<double>(model.noise().base_variances.data(),
                                                model.noise().base_variances.data() + model.n());
  const auto& corr = model.noise().correlation;
  if (const auto* a = std::get_if<AffineCorrelationSpec>(&corr)) {
    noise["kind"] = "affine";
    json lat = json::array();
    for (Index l = 0; l < a->gains.cols(); ++l) {
      json children = json::array(), taps = json::array();
      for (Index i = 0; i < model.n(); ++i)
        if (!a->gains.is_zero_entry(i, l)) {
          children.push_back(i);
          taps.push_back(taps_json(a->gains.entry(i, l)));
        }
      lat.push_back({{"id", l}, {"children", children}, {"taps", taps}, {"variance", a->latent_variances[l]}});
    }
    noise["latents"] = lat;
  } else if (const auto* p = std::get_if<PolyCorrelationSpec>(&corr)) {
    noise["kind"] = "polynomial";
    noise["m"] = p->m;
    noise["p"] = p->p;
    noise["sigma"] = p->sigma;
    json gains = json::array();
    for (Index k = 0; k < p->gains.cols(); ++k)
      for (Index i = 0; i < p->gains.rows(); ++i)
        if (!p->gains.is_zero_entry(i, k))
          gains.push_back({{"node", i}, {"monomial_index", k}, {"taps", taps_json(p->gains.entry(i, k))}});
    noise["gains"] = gains;
  } else {
    noise["kind"] = "none";
  }
  doc["noise"] = noise;
  return doc;
}

Ldim model_from_json(const json& doc) {
  try {
    const Index n = doc.at("n").get<Index>();
    if (n < 1) throw ValidationError("model needs n >= 1");
    TransferMatrix h(n, n);
    for (const json& e : doc.at("edges")) {
      Index from = e.at("from").get<Index>(), to = e.at("to").get<Index>();
      if (from < 0 || to < 0 || from >= n || to >= n) throw ValidationError("edge endpoint out of range");
      if (from == to) throw ValidationError("self-loop in model edges");
      h.set(to, from, taps_from(e.at("taps")));
    }
    const json& nz = doc.at("noise");
    NoiseSpec ns;
    auto bv = nz.at("base_variances").get<std::vector<double>>();
    if (static_cast<Index>(bv.size()) != n) throw ValidationError("base_variances must have n entries");
    ns.base_variances = Eigen::Map<Vector>(bv.data(), n);
    std::string kind = nz.value("kind", std::string("none"));
    if (kind == "affine") {
      const json& lat = nz.at("latents");
      AffineCorrelationSpec a{TransferMatrix(n, static_cast<Index>(lat.size())), Vector(lat.size())};
      for (size_t l = 0; l < lat.size(); ++l) {
        const json& ch = lat[l].at("children");
        const json& tp = lat[l].at("taps");
        if (ch.size() != tp.size()) throw ValidationError("latent children and taps differ in length");
        for (size_t c = 0; c < ch.size(); ++c) {
          Index i = ch[c].get<Index>();
          if (i < 0 || i >= n) throw ValidationError("latent child out of range");
          a.gains.set(i, static_cast<Index>(l), taps_from(tp[c]));
        }
        a.latent_variances[l] = lat[l].value("variance", 1.0);
      }
      ns.correlation = a;
    } else if (kind == "polynomial") {
      PolyCorrelationSpec p;
      p.m = nz.at("m").get<int>();
      p.p = nz.at("p").get<int>();
      p.sigma = nz.at("sigma").get<double>();
      const Index mcount = static_cast<Index>(monomial_count(p.m, p.p));
      if (mcount > static_cast<Index>(kMaxMonomials)) throw ValidationError("monomial basis too large");
      p.gains = TransferMatrix(n, mcount);
      for (const json& g : nz.at("gains")) {
        Index i = g.at("node").get<Index>(), k = g.at("monomial_index").get<Index>();
        if (i < 0 || i >= n || k < 0 || k >= mcount) throw ValidationError("polynomial gain index out of range");
        p.gains.set(i, k, taps_from(g.at("taps")));
      }
      ns.correlation = p;
    } else if (kind != "none") {
      throw ValidationError("unknown noise kind '" + kind + "'");
    }
    return Ldim(h, ns);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what());
  }
}

json graph_to_json(const UndirectedGraph& g) {
  json e = json::array();
  for (const auto& [a, b] : g.edges()) e.push_back({a, b});
  return e;
}

UndirectedGraph graph_from_json(Index n, const json& edges) {
  UndirectedGraph g(n);
  for (const json& e : edges) g.add_edge(e.at(0).get<Index>(), e.at(1).get<Index>());
  return g;
}

json benchmark_to_json(const GeneratedModel& gm, const json& meta) {
  json doc = model_to_json(gm.model);
  doc["truth"] = {{"topology", graph_to_json(gm.topology)}, {"correlation_graph", graph_to_json(gm.correlation)}};
  doc["generator"] = {{"attempts", gm.attempts},
                      {"attempt_seed", gm.attempt_seed},
                      {"sufficient_product", gm.sufficient_product},
                      {"validated_t0", gm.t0}};
  doc["meta"] = meta;
  return doc;
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("model file is not valid JSON: " + std::string(e.what()));
  }
  LoadedModel lm{model_from_json(doc), std::nullopt, std::nullopt, doc.value("meta", json::object())};
  if (doc.contains("truth")) {
    const json& t = doc["truth"];
    if (t.contains("topology")) lm.topology = graph_from_json(lm.model.n(), t["topology"]);
    if (t.contains("correlation_graph")) lm.correlation = graph_from_json(lm.model.n(), t["correlation_graph"]);
  }
  return lm;
}

void save_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << doc.dump(2) << "\n";
}

void write_sweep_csv(std::ostream& os, const SweepResult& sr, const json& meta) {
  os << csv_meta_line(meta) << " c_norm=" << num(sr.c_norm) << "\n";
  os << "t,diff_t,tol_t,degmax_S,inc_L,rank_L,primal_residual,iters\n";
  for (const SweepRecord& r : sr.records) {
    os << num(r.t) << ',' << num(r.diff) << ',' << (r.tol ? num(*r.tol) : "") << ',' << r.degmax_s << ','
       << num(r.inc_l) << ',' << r.rank_l << ',' << num(r.primal_residual) << ',' << r.iterations << "\n";
  }
}

void write_matrix_csv(std::ostream& os, const Matrix& m, const json& meta) {
  os << csv_meta_line(meta) << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << num(m(i, j));
    os << "\n";
  }
}

void write_edges_csv(std::ostream& os, const UndirectedGraph& g, const json& meta) {
  os << csv_meta_line(meta) << "\n" << "i,j\n";
  for (const auto& [a, b] : g.edges()) os << a << ',' << b << "\n";
}

void write_series_csv(std::ostream& os, const TimeSeries& x) {
  os << "# corrnet " << kVersion << " seed=" << x.seed << " n=" << x.n() << " N=" << x.samples() << "\n";
  for (Index i = 0; i < x.n(); ++i) {
    for (Index t = 0; t < x.samples(); ++t) os << (t ? "," : "") << num(x.values(i, t));
    os << "\n";
  }
}

TimeSeries read_series_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) throw ValidationError("malformed series value '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ValidationError("series rows differ in length");
    rows.push_back(std::move(row));
  }
  TimeSeries x;
  x.values.resize(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t t = 0; t < rows[i].size(); ++t) x.values(i, t) = rows[i][t];
  return x;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary series format assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ValidationError("truncated binary series");
  return v;
}

}  // namespace

void write_series_binary(std::ostream& os, const TimeSeries& x) {
  put_le<std::int64_t>(os, x.n());
  put_le<std::int64_t>(os, x.samples());
  for (Index i = 0; i < x.n(); ++i)
    for (Index t = 0; t < x.samples(); ++t) put_le<double>(os, x.values(i, t));
}

TimeSeries read_series_binary(std::istream& is) {
  auto n = get_le<std::int64_t>(is), len = get_le<std::int64_t>(is);
  if (n < 0 || len < 0) throw ValidationError("negative dimensions in binary series");
  TimeSeries x;
  x.values.resize(n, len);
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < len; ++t) x.values(i, t) = get_le<double>(is);
  return x;
}

json spectral_to_json(const SpectralEstimate& est) {
  json out;
  out["segments"] = est.segments;
  json vals = json::array();
  for (size_t k = 0; k < est.omegas.size(); ++k) {
    json m = json::array();
    for (Index i = 0; i < est.values[k].rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < est.values[k].cols(); ++j) row.push_back({est.values[k](i, j).real(), est.values[k](i, j).imag()});
      m.push_back(row);
    }
    vals.push_back({{"omega", est.omegas[k]}, {"values", m}});
  }
  out["estimates"] = vals;
  return out;
}

namespace {

json metrics_json(const EdgeMetrics& m) {
  return {{"true_positives", m.true_positives},
          {"false_positives", m.false_positives},
          {"false_negatives", m.false_negatives},
          {"total_error_fraction", m.total_error_fraction}};
}

json interval_json(const TInterval& r) { return {{"lo", r.lo}, {"hi", r.hi}}; }

}  // namespace

json report_to_json(const ReconstructionReport& rep) {
  json j;
  j["omega"] = rep.omega;
  j["eps"] = rep.eps;
  j["thresholds"] = {{"tau_edge", rep.tau_edge}, {"tau_zero", rep.tau_zero}, {"tau_rank", rep.tau_rank}, {"tau_supp", rep.tau_supp}};
  json regions = json::array();
  for (const auto& r : rep.regions) regions.push_back(interval_json(r));
  j["zero_regions"] = regions;
  j["completed"] = rep.ok();
  if (!rep.ok()) j["error"] = rep.error;
  if (rep.selection) {
    const RegionSelection& s = *rep.selection;
    j["selection"] = {{"t0", s.t0},
                      {"middle", interval_json(s.middle)},
                      {"ambiguous", s.ambiguous},
                      {"note", s.note},
                      {"sufficient_condition",
                       {{"holds", s.condition.holds}, {"deg_max", s.condition.deg}, {"inc", s.condition.inc},
                        {"product", s.condition.product}}}};
  }
  j["topology"] = graph_to_json(rep.topology);
  if (rep.correlation)
    j["correlation_graph"] = {{"edges", graph_to_json(rep.correlation->graph)},
                              {"groups", rep.correlation->groups},
                              {"rank", rep.correlation->rank},
                              {"best_effort", rep.correlation->best_effort},
                              {"note", rep.correlation->note}};
  if (rep.metrics) j["metrics"] = metrics_json(*rep.metrics);
  if (rep.correlation_metrics) j["correlation_metrics"] = metrics_json(*rep.correlation_metrics);
  if (rep.direct)
    j["direct_baseline"] = {{"tau_edge", rep.direct->tau_edge},
                            {"topology", graph_to_json(rep.direct->topology)},
                            {"metrics", metrics_json(rep.direct->metrics)}};
  return j;
}

SweepTable read_sweep_csv(std::istream& is) {
  SweepTable tab;
  std::string line;
  bool header = false;
  std::vector<std::string> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto p = line.find("c_norm=");
      if (p != std::string::npos) tab.c_norm = std::stod(line.substr(p + 7));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (!header) {
      cols = cells;
      header = true;
      for (const char* need : {"t", "diff_t", "tol_t"})
        if (std::find(cols.begin(), cols.end(), need) == cols.end())
          throw ValidationError(std::string("sweep CSV lacks column '") + need + "'");
      continue;
    }
    if (cells.size() != cols.size()) throw ValidationError("sweep CSV row has the wrong number of cells");
    auto col = [&](const char* name) { return cells[std::find(cols.begin(), cols.end(), name) - cols.begin()]; };
    auto parse = [&](const std::string& s) {
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
      double v = 0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ValidationError("malformed number '" + s + "' in sweep CSV");
      return v;
    };
    tab.t.push_back(parse(col("t")));
    tab.diff.push_back(parse(col("diff_t")));
    std::string tol = col("tol_t");
    tab.tol.push_back(tol.empty() ? std::nullopt : std::optional<double>(parse(tol)));
  }
  if (!header) throw ValidationError("sweep CSV has no header");
  return tab;
}

}  // namespace corrnet
