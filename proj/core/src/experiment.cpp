#include "danilab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/flow.hpp"
#include "danilab/lattice.hpp"
#include "danilab/linalg.hpp"
#include "danilab/random.hpp"
#include "danilab/reptheory.hpp"

namespace danilab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::pair<Subcommand, std::string>>& subcommand_table() {
  static const std::vector<std::pair<Subcommand, std::string>> table = {
      {Subcommand::genericity, "genericity"},
      {Subcommand::dirichlet_scan, "dirichlet-scan"},
      {Subcommand::correspondence, "correspondence"},
      {Subcommand::equidist, "equidist"},
      {Subcommand::nondiv, "nondiv"},
      {Subcommand::rep_verify, "rep-verify"},
      {Subcommand::w_invariance, "w-invariance"},
  };
  return table;
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError(field, field + ": " + what);
}

Rational json_rational(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid(field, "must be finite");
    return rational_from_double(d);
  }
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
      invalid(field, "is not a rational number");
    }
  }
  invalid(field, "must be a number or a rational string such as \"1/37\"");
}

// Numbers when the value is an exact double, "p/q" strings otherwise.
json rational_json(const Rational& r) {
  const double d = to_double(r);
  if (std::isfinite(d) && rational_from_double(d) == r) {
    if (boost::multiprecision::denominator(r) == 1 && std::abs(d) < 9.0e15) {
      return static_cast<std::int64_t>(d);
    }
    return d;
  }
  return to_string(r);
}

double json_number(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(field, "must be finite");
  return d;
}

std::int64_t json_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) invalid(field, "must be an integer");
  return v.get<std::int64_t>();
}

RationalMatrix json_rational_matrix(const json& v, std::size_t rows, std::size_t cols,
                                    const std::string& field) {
  const std::string shape = std::to_string(rows) + "x" + std::to_string(cols);
  if (!v.is_array() || v.size() != rows) invalid(field, "must be a " + shape + " matrix (list of rows)");
  RationalMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) invalid(field, "must be a " + shape + " matrix (list of rows)");
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = json_rational(v[i][j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

json rational_matrix_json(const RationalMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rational_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

std::pair<int, int> locate(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Reads parameters, remembering which keys were consumed so unknown keys
// can be rejected.
class ParamReader {
 public:
  explicit ParamReader(const json& in) : in_(in) {
    if (!in_.is_object()) invalid("parameters", "must be an object");
  }

  const json* get(const std::string& key) {
    used_.insert(key);
    auto it = in_.find(key);
    return it == in_.end() ? nullptr : &*it;
  }

  static std::string field(const std::string& key) { return "parameters." + key; }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    return v ? json_number(*v, field(key)) : fallback;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = get(key);
    return v ? json_integer(*v, field(key)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) invalid(field(key), "must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) invalid(field(key), "must be a string");
    return v->get<std::string>();
  }

  // A single number or a nonempty list of numbers.
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    if (v->is_array()) {
      if (v->empty()) invalid(field(key), "must not be empty");
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(json_number((*v)[i], field(key) + "[" + std::to_string(i) + "]"));
      }
    } else {
      out.push_back(json_number(*v, field(key)));
    }
    return out;
  }

  void finish() const {
    for (const auto& item : in_.items()) {
      if (!used_.count(item.key())) invalid(field(item.key()), "unknown parameter for this subcommand");
    }
  }

 private:
  const json& in_;
  std::set<std::string> used_;
};

void check_mu(const Rational& mu, bool allow_one, const std::string& field) {
  if (allow_one) {
    if (!(mu > 0 && mu <= 1)) invalid(field, "mu must lie in (0,1]");
  } else if (!(mu > 0 && mu < 1)) {
    invalid(field, "mu must lie in (0,1)");
  }
}

// Either a list of positive integers or {"from": a, "to": b}.
std::vector<std::int64_t> read_N_set(ParamReader& p) {
  const std::string f = ParamReader::field("N");
  const json* v = p.get("N");
  std::vector<std::int64_t> out;
  if (!v) {
    for (std::int64_t N = 2; N <= 50; ++N) out.push_back(N);
    return out;
  }
  if (v->is_object()) {
    for (const auto& item : v->items()) {
      if (item.key() != "from" && item.key() != "to") invalid(f + "." + item.key(), "unknown key");
    }
    if (!v->contains("from") || !v->contains("to")) invalid(f, "range needs both from and to");
    const std::int64_t from = json_integer(v->at("from"), f + ".from");
    const std::int64_t to = json_integer(v->at("to"), f + ".to");
    if (from < 1 || to < from) invalid(f, "range must satisfy 1 <= from <= to");
    for (std::int64_t N = from; N <= to; ++N) out.push_back(N);
    return out;
  }
  if (!v->is_array() || v->empty()) invalid(f, "must be a nonempty list or a {from, to} range");
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::int64_t N = json_integer((*v)[i], f + "[" + std::to_string(i) + "]");
    if (N < 1) invalid(f + "[" + std::to_string(i) + "]", "N must be a positive integer");
    out.push_back(N);
  }
  return out;
}

json read_convention(ParamReader& p) {
  const std::string c = p.string("convention", "lattice_p_nonzero");
  if (c != "lattice_p_nonzero" && c != "both_nonzero") {
    invalid(ParamReader::field("convention"), "must be lattice_p_nonzero or both_nonzero");
  }
  return c;
}

Convention convention_of(const json& params) {
  return params.at("convention").get<std::string>() == "both_nonzero"
             ? Convention::both_nonzero
             : Convention::lattice_p_nonzero;
}

json read_observable(ParamReader& p, int n) {
  const std::string f = ParamReader::field("observable");
  const json* v = p.get("observable");
  if (!v) return json{{"kind", "kmu_indicator"}, {"mu", 0.7}};
  if (!v->is_object() || !v->contains("kind") || !v->at("kind").is_string()) {
    invalid(f, "must be an object with a kind");
  }
  const std::string kind = v->at("kind").get<std::string>();
  json out{{"kind", kind}};
  for (const auto& item : v->items()) {
    const bool known = item.key() == "kind" || (kind == "kmu_indicator" && item.key() == "mu") ||
                       (kind == "siegel_count" && item.key() == "halfwidths");
    if (!known) invalid(f + "." + item.key(), "unknown key for observable kind " + kind);
  }
  if (kind == "kmu_indicator") {
    const double mu = v->contains("mu") ? json_number(v->at("mu"), f + ".mu") : 0.7;
    check_mu(rational_from_double(mu), false, f + ".mu");
    out["mu"] = mu;
  } else if (kind == "siegel_count") {
    if (!v->contains("halfwidths")) invalid(f + ".halfwidths", "is required for siegel_count");
    const json& h = v->at("halfwidths");
    if (!h.is_array() || h.size() != static_cast<std::size_t>(2 * n)) invalid(f + ".halfwidths", "must list 2n values");
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (json_number(h[i], f + ".halfwidths") <= 0) invalid(f + ".halfwidths", "must be positive");
    }
    out["halfwidths"] = h;
  } else if (kind != "lambda1") {
    invalid(f + ".kind", "must be siegel_count, kmu_indicator or lambda1");
  }
  return out;
}

Observable observable_of(const json& o) {
  const std::string kind = o.at("kind").get<std::string>();
  if (kind == "kmu_indicator") return Observable::kmu_indicator(o.at("mu").get<double>());
  if (kind == "siegel_count") {
    const auto h = o.at("halfwidths").get<std::vector<double>>();
    return Observable::siegel_count(Eigen::Map<const Vector>(h.data(), static_cast<Eigen::Index>(h.size())));
  }
  return Observable::lambda1();
}

json normalize_parameters(Subcommand sub, const json& in, int n, const CurveSpec& curve) {
  ParamReader p(in);
  json out = json::object();
  const double a = to_double(curve.a);
  const double b = to_double(curve.b);
  const int m = 2 * n;

  auto in_interval = [&](const std::vector<double>& xs, const std::string& key) {
    for (double x : xs) {
      if (x < a || x > b) invalid(ParamReader::field(key), "values must lie in the curve interval");
    }
  };
  auto t_ladder = [&](std::vector<double> fallback) {
    const auto ts = p.numbers("t", std::move(fallback));
    out["t"] = ts;
  };

  switch (sub) {
    case Subcommand::genericity: {
      const auto s0 = p.numbers("s0", {0.5 * (a + b)});
      in_interval(s0, "s0");
      out["s0"] = s0;
      const std::int64_t samples = p.integer("m", 2 * n * n + 1);
      if (samples < n * n + 1) invalid(ParamReader::field("m"), "must be at least n^2 + 1");
      out["m"] = samples;
      const double tol = p.number("tol", kRankTol);
      if (!(tol > 0)) invalid(ParamReader::field("tol"), "must be positive");
      out["tol"] = tol;
      const std::int64_t jitter = p.integer("jitter_seed", 0);
      if (jitter < 0) invalid(ParamReader::field("jitter_seed"), "must be nonnegative");
      out["jitter_seed"] = jitter;
      break;
    }
    case Subcommand::dirichlet_scan: {
      const json* mu = p.get("mu");
      if (!mu) invalid(ParamReader::field("mu"), "is required");
      check_mu(json_rational(*mu, ParamReader::field("mu")), true, ParamReader::field("mu"));
      out["mu"] = *mu;
      out["N"] = read_N_set(p);
      const json* grid = p.get("s_grid");
      const json* points = p.get("s_points");
      if (grid && points) invalid(ParamReader::field("s_grid"), "give either s_grid or s_points, not both");
      if (grid) {
        const auto s = p.numbers("s_grid", {});
        in_interval(s, "s_grid");
        out["s_grid"] = s;
      } else {
        const std::int64_t count = points ? json_integer(*points, ParamReader::field("s_points")) : 101;
        if (count < 1) invalid(ParamReader::field("s_points"), "must be positive");
        out["s_points"] = count;
      }
      out["convention"] = read_convention(p);
      const json* th = p.get("thresholds");
      std::vector<std::int64_t> thresholds{1, 3, 10};
      if (th) {
        if (!th->is_array() || th->empty()) invalid(ParamReader::field("thresholds"), "must be a nonempty list");
        thresholds.clear();
        for (const auto& k : *th) thresholds.push_back(json_integer(k, ParamReader::field("thresholds")));
      }
      out["thresholds"] = thresholds;
      break;
    }
    case Subcommand::correspondence: {
      const json* phis = p.get("phis");
      const json* denom = p.get("phi_denominator");
      if ((phis != nullptr) == (denom != nullptr)) {
        invalid(ParamReader::field("phis"), "give exactly one of phis or phi_denominator");
      }
      if (phis) {
        if (!phis->is_array() || phis->empty()) invalid(ParamReader::field("phis"), "must be a nonempty list of matrices");
        json list = json::array();
        for (std::size_t i = 0; i < phis->size(); ++i) {
          const auto f = ParamReader::field("phis") + "[" + std::to_string(i) + "]";
          list.push_back(rational_matrix_json(json_rational_matrix((*phis)[i], static_cast<std::size_t>(n),
                                                                   static_cast<std::size_t>(n), f)));
        }
        out["phis"] = list;
      } else {
        const std::int64_t d = json_integer(*denom, ParamReader::field("phi_denominator"));
        if (d < 1) invalid(ParamReader::field("phi_denominator"), "must be positive");
        out["phi_denominator"] = d;
      }
      out["N"] = read_N_set(p);
      const json* mu = p.get("mu");
      if (!mu) invalid(ParamReader::field("mu"), "is required");
      json mus = mu->is_array() ? *mu : json::array({*mu});
      if (mus.empty()) invalid(ParamReader::field("mu"), "must not be empty");
      for (const auto& x : mus) check_mu(json_rational(x, ParamReader::field("mu")), true, ParamReader::field("mu"));
      out["mu"] = mus;
      out["convention"] = read_convention(p);
      if (out["convention"] != "lattice_p_nonzero") {
        invalid(ParamReader::field("convention"), "correspondence requires lattice_p_nonzero");
      }
      out["exact"] = p.boolean("exact", true);
      break;
    }
    case Subcommand::equidist: {
      t_ladder({2, 4, 6, 8});
      auto h = p.numbers("halfwidths", {0.9});
      if (h.size() == 1) h.assign(static_cast<std::size_t>(m), h.front());
      if (h.size() != static_cast<std::size_t>(m)) invalid(ParamReader::field("halfwidths"), "must give one value or 2n values");
      for (double x : h) {
        if (!(x > 0)) invalid(ParamReader::field("halfwidths"), "must be positive");
      }
      out["halfwidths"] = h;
      out["normalize"] = p.boolean("normalize", false);
      if (const json* bp = p.get("basepoint")) {
        const RationalMatrix base = json_rational_matrix(*bp, static_cast<std::size_t>(m),
                                                         static_cast<std::size_t>(m), ParamReader::field("basepoint"));
        try {
          LatticeBasis::from_matrix(base.to_double());
        } catch (const InvariantError& e) {
          invalid(ParamReader::field("basepoint"), e.what());
        }
        out["basepoint"] = rational_matrix_json(base);
      }
      break;
    }
    case Subcommand::nondiv: {
      t_ladder({2, 4, 6, 8});
      const double eps = p.number("eps", 0.05);
      if (!(eps > 0)) invalid(ParamReader::field("eps"), "must be positive");
      out["eps"] = eps;
      break;
    }
    case Subcommand::rep_verify: {
      const std::string rep = p.string("rep", "exterior");
      if (rep != "exterior" && rep != "adjoint") invalid(ParamReader::field("rep"), "must be exterior or adjoint");
      out["rep"] = rep;
      if (rep == "exterior") {
        const std::int64_t k = p.integer("k", 1);
        if (k < 1 || k > m) invalid(ParamReader::field("k"), "must lie in [1, 2n]");
        out["k"] = k;
      } else if (p.get("k")) {
        invalid(ParamReader::field("k"), "applies only to exterior representations");
      }
      const auto r = p.numbers("r", {1.0, -1.0, 0.5, -0.5});
      for (double x : r) {
        if (x == 0.0) invalid(ParamReader::field("r"), "must be nonzero");
      }
      out["r"] = r;
      const std::int64_t draws = p.integer("draws", 100);
      if (draws < 1) invalid(ParamReader::field("draws"), "must be positive");
      out["draws"] = draws;
      if (const json* samples = p.get("obstruction_samples")) {
        if (!samples->is_array() || samples->empty()) {
          invalid(ParamReader::field("obstruction_samples"), "must be a nonempty list");
        }
        json list = json::array();
        for (const auto& s : *samples) {
          const Rational x = json_rational(s, ParamReader::field("obstruction_samples"));
          if (x < curve.a || x > curve.b) invalid(ParamReader::field("obstruction_samples"), "values must lie in the curve interval");
          list.push_back(rational_json(x));
        }
        out["obstruction_samples"] = list;
      }
      if (p.get("w0")) out["w0"] = p.numbers("w0", {});
      break;
    }
    case Subcommand::w_invariance: {
      t_ladder({2, 8});
      out["r"] = p.number("r", 1.0);
      out["observable"] = read_observable(p, n);
      break;
    }
  }
  p.finish();
  return out;
}

CurveSpec parse_curve(const json& v, int n) {
  if (!v.is_object()) invalid("curve", "must be an object");
  for (const auto& item : v.items()) {
    if (item.key() != "degree" && item.key() != "coeffs" && item.key() != "interval") {
      invalid("curve." + item.key(), "unknown key");
    }
  }
  if (!v.contains("degree")) invalid("curve.degree", "is required");
  if (!v.contains("coeffs")) invalid("curve.coeffs", "is required");
  if (!v.contains("interval")) invalid("curve.interval", "is required");
  CurveSpec c;
  const std::int64_t degree = json_integer(v.at("degree"), "curve.degree");
  if (degree < 0 || degree > 64) invalid("curve.degree", "must lie in [0, 64]");
  c.degree = static_cast<int>(degree);
  const json& coeffs = v.at("coeffs");
  if (!coeffs.is_array() || coeffs.size() != static_cast<std::size_t>(degree + 1)) {
    invalid("curve.coeffs", "must list degree + 1 coefficient matrices");
  }
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    c.coeffs.push_back(json_rational_matrix(coeffs[k], static_cast<std::size_t>(n), static_cast<std::size_t>(n),
                                            "curve.coeffs[" + std::to_string(k) + "]"));
  }
  const json& interval = v.at("interval");
  if (!interval.is_array() || interval.size() != 2) invalid("curve.interval", "must be [a, b]");
  c.a = json_rational(interval[0], "curve.interval[0]");
  c.b = json_rational(interval[1], "curve.interval[1]");
  if (!(c.b > c.a)) invalid("curve.interval", "must satisfy a < b");
  return c;
}

Sampler parse_sampler(const json& v) {
  Sampler s;
  if (v.is_null()) return s;
  if (!v.is_object()) invalid("sampler", "must be an object");
  for (const auto& item : v.items()) {
    const auto& k = item.key();
    if (k == "seed") {
      if (!item.value().is_number_integer() || item.value().get<std::int64_t>() < 0) {
        if (!item.value().is_number_unsigned()) invalid("sampler.seed", "must be a nonnegative integer");
      }
      s.seed = item.value().get<std::uint64_t>();
    } else if (k == "count") {
      s.count = json_integer(item.value(), "sampler.count");
      if (s.count < 2) invalid("sampler.count", "must be at least 2");
    } else if (k == "scheme") {
      if (!item.value().is_string()) invalid("sampler.scheme", "must be a string");
      const auto name = item.value().get<std::string>();
      if (name == "uniform_iid") {
        s.scheme = Scheme::uniform_iid;
      } else if (name == "stratified_grid") {
        s.scheme = Scheme::stratified_grid;
      } else {
        invalid("sampler.scheme", "must be uniform_iid or stratified_grid");
      }
    } else {
      invalid("sampler." + k, "unknown key");
    }
  }
  return s;
}

json config_json(const ExperimentConfig& c) {
  json coeffs = json::array();
  for (const auto& m : c.curve.coeffs) coeffs.push_back(rational_matrix_json(m));
  return json{
      {"experiment_id", c.experiment_id},
      {"subcommand", to_string(c.subcommand)},
      {"n", c.n},
      {"curve",
       {{"degree", c.curve.degree},
        {"coeffs", coeffs},
        {"interval", {rational_json(c.curve.a), rational_json(c.curve.b)}}}},
      {"parameters", c.parameters},
      {"sampler",
       {{"seed", c.sampler.seed},
        {"count", c.sampler.count},
        {"scheme", c.sampler.scheme == Scheme::uniform_iid ? "uniform_iid" : "stratified_grid"}}},
      {"output", c.output},
  };
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson matrix_json(const Matrix& m) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

ojson vector_json(const Vector& v) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

class RecordSink {
 public:
  explicit RecordSink(const ExperimentConfig& c) : id_(c.experiment_id), hash_(config_hash(c)) {}

  void add(std::string module, std::string op, ojson fields) {
    records_.push_back(RunRecord{id_, std::move(module), std::move(op), std::move(fields), hash_, "ok",
                                 utc_timestamp()});
  }

  std::vector<RunRecord> take() { return std::move(records_); }

 private:
  std::string id_;
  std::string hash_;
  std::vector<RunRecord> records_;
};

ojson stats_fields(const ObservableRecord& r) {
  ojson f;
  f["t"] = r.t;
  f["observable"] = r.observable;
  f["mean"] = r.mean;
  f["stderr"] = r.std_error;
  f["M"] = r.samples;
  f["seed"] = r.seed;
  return f;
}

void run_genericity(const ExperimentConfig& c, RecordSink& sink) {
  const MatrixPolyCurve curve = c.curve.to_curve();
  const auto& p = c.parameters;
  for (double s0 : p.at("s0").get<std::vector<double>>()) {
    const GenericityVerdict v = genericity_test(curve, s0, static_cast<int>(p.at("m").get<std::int64_t>()),
                                                p.at("tol").get<double>(), p.at("jitter_seed").get<std::uint64_t>());
    ojson f;
    f["s0"] = s0;
    f["verdict"] = v.verdict == Verdict::generic ? "generic" : "degenerate";
    f["affine_rank"] = v.affine_rank;
    f["samples_used"] = v.samples_used;
    f["radius"] = v.radius;
    ojson witness = ojson::array();
    for (const auto& w : v.witness_subspace) witness.push_back(vector_json(w));
    f["witness_subspace"] = witness;
    sink.add("curve", "genericity_test", std::move(f));
  }
}

std::vector<double> scan_grid(const ExperimentConfig& c) {
  const auto& p = c.parameters;
  if (p.contains("s_grid")) return p.at("s_grid").get<std::vector<double>>();
  const auto count = p.at("s_points").get<std::int64_t>();
  const double a = to_double(c.curve.a);
  const double b = to_double(c.curve.b);
  std::vector<double> grid;
  for (std::int64_t i = 0; i < count; ++i) {
    grid.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

ScanTable run_scan(const ExperimentConfig& c, RecordSink& sink, int threads) {
  const auto& p = c.parameters;
  const double mu = to_double(json_rational(p.at("mu"), "parameters.mu"));
  const auto N_set = p.at("N").get<std::vector<std::int64_t>>();
  std::vector<int> thresholds;
  for (auto k : p.at("thresholds").get<std::vector<std::int64_t>>()) thresholds.push_back(static_cast<int>(k));
  ScanTable table = improvability_scan(c.curve.to_curve(), mu, scan_grid(c), N_set, convention_of(p),
                                       thresholds, threads);
  ojson f;
  f["mu"] = mu;
  f["convention"] = p.at("convention");
  f["s_points"] = table.s_grid.size();
  f["N_count"] = table.N_set.size();
  ojson fractions = ojson::object();
  for (const auto& [k, frac] : table.fraction_with_at_least_k) fractions[std::to_string(k)] = frac;
  f["fraction_with_at_least_k"] = fractions;
  std::size_t insoluble = 0;
  ojson cells = ojson::array();
  for (std::size_t i = 0; i < table.s_grid.size(); ++i) {
    for (std::size_t j = 0; j < table.N_set.size(); ++j) {
      if (!table.at(i, j)) continue;
      ++insoluble;
      cells.push_back(ojson::array({table.s_grid[i], table.N_set[j]}));
    }
  }
  f["insoluble_cells"] = insoluble;
  // At mu = 1 every insoluble cell is a strict-inequality boundary case.
  if (mu == 1.0) f["boundary_rows"] = cells;
  sink.add("dirichlet", "improvability_scan", std::move(f));
  return table;
}

void run_correspondence(const ExperimentConfig& c, RecordSink& sink) {
  const auto& p = c.parameters;
  const auto n = static_cast<std::size_t>(c.n);
  std::vector<RationalMatrix> phis;
  if (p.contains("phis")) {
    for (const auto& m : p.at("phis")) phis.push_back(json_rational_matrix(m, n, n, "parameters.phis"));
  } else {
    const auto d = p.at("phi_denominator").get<std::int64_t>();
    for (std::int64_t k = 0; k <= d; ++k) phis.push_back(Rational(k, d) * RationalMatrix::identity(n));
  }
  const auto N_set = p.at("N").get<std::vector<std::int64_t>>();
  const bool exact_mode = p.at("exact").get<bool>();

  std::size_t cells = 0;
  std::size_t agreements = 0;
  for (const auto& mu_json : p.at("mu")) {
    const Rational mu = json_rational(mu_json, "parameters.mu");
    for (const auto& phi : phis) {
      for (std::int64_t N : N_set) {
        const CorrespondenceRecord rec =
            exact_mode ? correspondence_check(ExactDirichletQuery(phi, N, mu))
                       : correspondence_check(DirichletQuery(phi.to_double(), N, to_double(mu)));
        ++cells;
        agreements += rec.agree ? 1 : 0;
        ojson f;
        f["phi"] = ojson::parse(rational_matrix_json(phi).dump());
        f["N"] = N;
        f["mu"] = to_string(mu);
        f["insoluble"] = rec.insoluble;
        f["in_kmu"] = rec.in_kmu;
        f["agree"] = rec.agree;
        sink.add("dirichlet", "correspondence_check", std::move(f));
      }
    }
  }
  ojson f;
  f["cells"] = cells;
  f["agreements"] = agreements;
  f["all_agree"] = cells == agreements;
  f["exact"] = exact_mode;
  sink.add("dirichlet", "correspondence_summary", std::move(f));
}

void run_equidist(const ExperimentConfig& c, RecordSink& sink, int threads) {
  const auto& p = c.parameters;
  const MatrixPolyCurve curve = c.curve.to_curve();
  const auto h = p.at("halfwidths").get<std::vector<double>>();
  const Vector box = Eigen::Map<const Vector>(h.data(), static_cast<Eigen::Index>(h.size()));
  const auto m = static_cast<std::size_t>(2 * c.n);
  const LatticeBasis base =
      p.contains("basepoint")
          ? LatticeBasis::from_matrix(json_rational_matrix(p.at("basepoint"), m, m, "parameters.basepoint").to_double())
          : LatticeBasis::identity(2 * c.n);
  for (double t : p.at("t").get<std::vector<double>>()) {
    const ObservableRecord r = siegel_average(curve, t, box, base, p.at("normalize").get<bool>(), c.sampler, threads);
    sink.add("stats", "siegel_average", stats_fields(r));
  }
}

void run_nondiv(const ExperimentConfig& c, RecordSink& sink, int threads) {
  const auto& p = c.parameters;
  const auto profile = nondivergence_profile(c.curve.to_curve(), p.at("t").get<std::vector<double>>(),
                                             p.at("eps").get<double>(), c.sampler, threads);
  for (const auto& point : profile) {
    ObservableRecord r{point.t, "lambda1_below_eps", point.fraction, point.std_error, c.sampler.count, c.sampler.seed};
    sink.add("stats", "nondivergence_profile", stats_fields(r));
  }
}

// Random Phi with |det| >= 0.1, drawn from the sampler seed.
Matrix random_invertible(int n, std::uint64_t seed, std::uint64_t draw) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Matrix phi(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        phi(i, j) = counter_normal(seed, draw, attempt * 64 + static_cast<std::uint64_t>(i * n + j));
      }
    if (std::abs(phi.determinant()) >= 0.1) return phi;
  }
}

void run_rep_verify(const ExperimentConfig& c, RecordSink& sink) {
  const auto& p = c.parameters;
  const std::string kind = p.at("rep").get<std::string>();
  const Representation rep = kind == "exterior"
                                 ? Representation::exterior(c.n, static_cast<int>(p.at("k").get<std::int64_t>()))
                                 : Representation::adjoint(c.n);
  const WeightDecomposition decomp = weight_split(rep);
  const auto draws = p.at("draws").get<std::int64_t>();
  const std::uint64_t seed = c.sampler.seed;

  for (double r : p.at("r").get<std::vector<double>>()) {
    double max_residual = 0.0;
    double min_qplus = std::numeric_limits<double>::infinity();
    std::int64_t constrained_total = 0;
    for (std::int64_t d = 0; d < draws; ++d) {
      const Sl2Copy copy(random_invertible(c.n, seed, static_cast<std::uint64_t>(d)));
      const Matrix basis = constrained_subspace(rep, copy, r);
      constrained_total += basis.cols();
      Vector v = Vector::Zero(rep.dim());
      for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        v += counter_normal(seed ^ 0x5a5aULL, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(j)) * basis.col(j);
      }
      max_residual = std::max(max_residual, verify_q0_transport(rep, copy, r, v));
      if (!decomp.minus_idx.empty()) {
        Vector w = Vector::Zero(rep.dim());
        for (std::size_t j = 0; j < decomp.minus_idx.size(); ++j) {
          w(decomp.minus_idx[j]) = counter_normal(seed ^ 0xa5a5ULL, static_cast<std::uint64_t>(d), j);
        }
        w /= w.norm();
        min_qplus = std::min(min_qplus, verify_qplus_nonvanish(rep, copy, r, w));
      }
    }
    ojson f;
    f["rep"] = kind;
    if (kind == "exterior") f["k"] = rep.k();
    f["r"] = r;
    f["draws"] = draws;
    f["mean_constrained_dim"] = static_cast<double>(constrained_total) / static_cast<double>(draws);
    f["max_q0_residual"] = max_residual;
    if (std::isfinite(min_qplus)) {
      f["min_qplus_norm"] = min_qplus;
    } else {
      f["min_qplus_norm"] = nullptr;
    }
    sink.add("reptheory", "q0_transport", std::move(f));
  }

  if (p.contains("obstruction_samples")) {
    std::vector<Rational> samples;
    ojson listed = ojson::array();
    for (const auto& s : p.at("obstruction_samples")) {
      samples.push_back(json_rational(s, "parameters.obstruction_samples"));
      listed.push_back(to_string(samples.back()));
    }
    const RationalMatrix basis = obstruction_subspace(rep, c.curve.to_exact(), samples);
    ojson f;
    f["rep"] = kind;
    if (kind == "exterior") f["k"] = rep.k();
    f["samples"] = listed;
    f["dimension"] = basis.cols();
    f["exact"] = true;
    sink.add("reptheory", "obstruction_subspace", std::move(f));
  }

  if (p.contains("w0")) {
    const auto w = p.at("w0").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != rep.dim()) {
      throw ValidationError("parameters.w0", "parameters.w0: length must equal the representation dimension");
    }
    const InvarianceResult inv =
        invariance_subspace(rep, decomp, Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
    ojson basis = ojson::array();
    for (const auto& b : inv.basis) basis.push_back(matrix_json(b));
    ojson f;
    f["rep"] = kind;
    if (kind == "exterior") f["k"] = rep.k();
    f["dimension"] = inv.basis.size();
    f["basis"] = basis;
    f["verified"] = inv.verified;
    f["max_residual"] = inv.max_residual;
    sink.add("reptheory", "invariance_subspace", std::move(f));
  }
}

void run_w_invariance(const ExperimentConfig& c, RecordSink& sink, int threads) {
  const auto& p = c.parameters;
  const MatrixPolyCurve curve = c.curve.to_curve();
  const Observable obs = observable_of(p.at("observable"));
  const double r = p.at("r").get<double>();
  for (double t : p.at("t").get<std::vector<double>>()) {
    ojson f;
    f["t"] = t;
    f["observable"] = obs.name();
    f["r"] = r;
    f["gap"] = w_invariance_gap(curve, t, r, obs, c.sampler, threads);
    f["M"] = c.sampler.count;
    f["seed"] = c.sampler.seed;
    sink.add("stats", "w_invariance_gap", std::move(f));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string to_string(Subcommand sub) {
  for (const auto& [s, name] : subcommand_table()) {
    if (s == sub) return name;
  }
  return "";
}

Subcommand parse_subcommand(std::string_view name) {
  for (const auto& [s, n] : subcommand_table()) {
    if (n == name) return s;
  }
  throw ValidationError("subcommand", "subcommand: unknown subcommand '" + std::string(name) + "'");
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : subcommand_table()) out.push_back(entry.second);
    return out;
  }();
  return names;
}

MatrixPolyCurve CurveSpec::to_curve() const {
  std::vector<Matrix> m;
  for (const auto& c : coeffs) m.push_back(c.to_double());
  return MatrixPolyCurve(std::move(m), to_double(a), to_double(b));
}

RationalPolyCurve CurveSpec::to_exact() const { return RationalPolyCurve(coeffs, a, b); }

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return experiment_id == other.experiment_id && subcommand == other.subcommand && n == other.n &&
         curve == other.curve && parameters == other.parameters && sampler.seed == other.sampler.seed &&
         sampler.count == other.sampler.count && sampler.scheme == other.sampler.scheme &&
         output == other.output;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte);
    throw ParseError("malformed config at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
  if (!doc.is_object()) invalid("config", "top level must be an object");
  static const std::set<std::string> known = {"experiment_id", "subcommand", "n", "curve",
                                              "parameters", "sampler", "output"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) invalid(item.key(), "unknown top-level key");
  }

  ExperimentConfig c;
  if (!doc.contains("experiment_id") || !doc["experiment_id"].is_string() ||
      doc["experiment_id"].get<std::string>().empty()) {
    invalid("experiment_id", "must be a nonempty string");
  }
  c.experiment_id = doc["experiment_id"].get<std::string>();
  if (!doc.contains("subcommand") || !doc["subcommand"].is_string()) invalid("subcommand", "must be a string");
  c.subcommand = parse_subcommand(doc["subcommand"].get<std::string>());
  if (!doc.contains("n")) invalid("n", "is required");
  const std::int64_t n = json_integer(doc["n"], "n");
  if (n < 1 || n > 4) invalid("n", "must lie in [1, 4]");
  c.n = static_cast<int>(n);
  if (!doc.contains("curve")) invalid("curve", "is required");
  c.curve = parse_curve(doc["curve"], c.n);
  c.sampler = parse_sampler(doc.contains("sampler") ? doc["sampler"] : json());
  c.parameters = normalize_parameters(c.subcommand, doc.contains("parameters") ? doc["parameters"] : json::object(),
                                      c.n, c.curve);
  if (doc.contains("output")) {
    if (!doc["output"].is_string() || doc["output"].get<std::string>().empty()) {
      invalid("output", "must be a nonempty string");
    }
    c.output = doc["output"].get<std::string>();
  } else {
    c.output = c.experiment_id;
  }
  return c;
}

std::string serialize(const ExperimentConfig& config) { return config_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

ojson RunRecord::to_json() const {
  ojson j;
  j["experiment_id"] = experiment_id;
  j["module"] = module;
  j["op"] = op;
  for (const auto& item : fields.items()) j[item.key()] = item.value();
  j["config_hash"] = config_hash;
  j["status"] = status;
  j["timestamp"] = timestamp;
  return j;
}

std::string RunRecord::payload() const {
  ojson j = to_json();
  j.erase("timestamp");
  return j.dump();
}

std::string to_jsonl(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

RunResult execute(const ExperimentConfig& config, int threads) {
  RecordSink sink(config);
  RunResult result;
  switch (config.subcommand) {
    case Subcommand::genericity: run_genericity(config, sink); break;
    case Subcommand::dirichlet_scan: result.table = run_scan(config, sink, threads); break;
    case Subcommand::correspondence: run_correspondence(config, sink); break;
    case Subcommand::equidist: run_equidist(config, sink, threads); break;
    case Subcommand::nondiv: run_nondiv(config, sink, threads); break;
    case Subcommand::rep_verify: run_rep_verify(config, sink); break;
    case Subcommand::w_invariance: run_w_invariance(config, sink, threads); break;
  }
  result.records = sink.take();
  return result;
}

void write_outputs(const ExperimentConfig& config, const RunResult& result) {
  write_text(config.output + ".jsonl", to_jsonl(result.records));
  if (result.table) {
    std::ostringstream csv;
    write_scan_csv(csv, *result.table);
    write_text(config.output + ".csv", csv.str());
  }
}

std::vector<RunRecord> run(const ExperimentConfig& config, int threads) {
  RunResult result = execute(config, threads);
  write_outputs(config, result);
  return std::move(result.records);
}

AssertionReport check_baseline(const json& baseline, const std::vector<RunRecord>& records) {
  if (!baseline.is_object() || !baseline.contains("checks") || !baseline["checks"].is_array()) {
    throw ValidationError("checks", "checks: baseline must be an object with a checks list");
  }
  std::vector<json> views;
  for (const auto& r : records) views.push_back(json::parse(r.to_json().dump()));

  AssertionReport report;
  for (std::size_t c = 0; c < baseline["checks"].size(); ++c) {
    const json& check = baseline["checks"][c];
    const std::string label = "checks[" + std::to_string(c) + "]";
    if (!check.is_object() || !check.contains("field") || !check["field"].is_string() ||
        check["field"].get<std::string>().empty()) {
      throw ValidationError(label, label + ": needs a field name");
    }
    const bool numeric = check.contains("expected");
    if (numeric == check.contains("equals")) {
      throw ValidationError(label, label + ": give exactly one of expected or equals");
    }
    if (numeric && (!check["expected"].is_number() || !check.contains("abs_tol") || !check["abs_tol"].is_number())) {
      throw ValidationError(label, label + ": expected and abs_tol must be numbers");
    }
    const json match = check.value("match", json::object());
    const std::string field = check["field"].get<std::string>();
    std::size_t selected = 0;
    for (const auto& view : views) {
      bool hit = true;
      for (const auto& item : match.items()) {
        if (!view.contains(item.key()) || view[item.key()] != item.value()) {
          hit = false;
          break;
        }
      }
      if (!hit) continue;
      ++selected;
      // A leading '/' selects a nested value by JSON pointer.
      const json::json_pointer ptr(field.front() == '/' ? field : "/" + field);
      if (!view.contains(ptr)) {
        report.failures.push_back(label + ": record lacks field " + field);
        continue;
      }
      const json& got = view[ptr];
      if (numeric) {
        const double expected = check["expected"].get<double>();
        const double tol = check["abs_tol"].get<double>();
        if (!got.is_number() || std::abs(got.get<double>() - expected) > tol) {
          report.failures.push_back(label + ": " + field + " = " + got.dump() + ", expected " +
                                    std::to_string(expected) + " +- " + std::to_string(tol));
        }
      } else if (got != check["equals"]) {
        report.failures.push_back(label + ": " + field + " = " + got.dump() + ", expected " + check["equals"].dump());
      }
    }
    if (selected == 0) report.failures.push_back(label + ": no record matches " + match.dump());
  }
  report.passed = report.failures.empty();
  return report;
}

}  // namespace danilab
