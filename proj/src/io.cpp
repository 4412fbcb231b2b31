#include "tfe/io.hpp"

#include <bit>
#include <cstring>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

namespace tfe {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ConfigError, field + ": " + why);
}

// reads known keys of an object and rejects the rest
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "config" : path_, "expected an object");
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(name(it.key()), "unknown key");
  }
  std::string name(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  const Json* get(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }
  void num(const std::string& k, double& v) {
    if (auto p = get(k)) {
      if (!p->is_number()) bad(name(k), "expected a number");
      v = p->get<double>();
    }
  }
  void integer(const std::string& k, int& v) {
    if (auto p = get(k)) {
      if (!p->is_number_integer()) bad(name(k), "expected an integer");
      v = p->get<int>();
    }
  }
  void str(const std::string& k, std::string& v) {
    if (auto p = get(k)) {
      if (!p->is_string()) bad(name(k), "expected a string");
      v = p->get<std::string>();
    }
  }
  void boolean(const std::string& k, bool& v) {
    if (auto p = get(k)) {
      if (!p->is_boolean()) bad(name(k), "expected true or false");
      v = p->get<bool>();
    }
  }
  void list(const std::string& k, std::vector<double>& v) {
    if (auto p = get(k)) {
      if (!p->is_array()) bad(name(k), "expected a list of numbers");
      v.clear();
      for (const auto& x : *p) {
        if (!x.is_number()) bad(name(k), "expected a list of numbers");
        v.push_back(x.get<double>());
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(const std::string& f, double v) {
  if (!(v > 0) || !std::isfinite(v)) bad(f, "must be positive, got " + fmt(v));
}

}  // namespace

QuadConfig RunConfig::quad() const {
  QuadConfig q;
  q.quad_tol = quad_tol;
  q.tail_tol = tail_tol;
  return q;
}

RunConfig default_config(int N) {
  RunConfig c;
  c.N = N;
  if (N == 2) {
    c.h = 0.1;
    c.R = 24.0;
    c.quad_tol = 1e-3;
    c.tail_tol = 1e-4;
    c.kmax = 3;
  }
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["dimension"] = c.N;
  j["grid"] = {{"h", c.h}, {"R", c.R}};
  j["tolerances"] = {{"quad_tol", c.quad_tol}, {"tail_tol", c.tail_tol}, {"resid_tol", c.resid_tol}};
  j["kmax"] = c.kmax;
  j["n_list"] = c.n_list;
  j["output"] = {{"dir", c.out_dir}, {"deterministic", c.deterministic}};
  j["branch"] = {{"k", c.branch.k},
                 {"kind", c.branch.kind},
                 {"eta", c.branch.eta},
                 {"lattice", c.branch.lattice},
                 {"scan_points", c.branch.scan_points}};
  j["continue"] = {{"kind", c.cont.kind}, {"k", c.cont.k}, {"radius", c.cont.radius}};
  j["evolve"] = {{"k", c.evolve.k}, {"sigma", c.evolve.sigma}, {"taus", c.evolve.taus}};
  const ProfileConfig& p = c.profile;
  j["profile"] = {{"h_out", p.h_out},         {"y_max", p.y_max},
                  {"rtol", p.rtol},           {"atol", p.atol},
                  {"h_min", p.h_min},         {"tail_tol", p.tail_tol},
                  {"tail_nodes", p.tail_nodes}, {"max_iter", p.max_iter},
                  {"max_segments", p.max_segments}, {"blowup_L", p.blowup_L},
                  {"growth_margin", p.growth_margin}, {"alpha_tol", p.alpha_tol},
                  {"secant_max", p.secant_max}};
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  int N = 1;
  if (auto it = j.find("dimension"); it != j.end()) {
    if (!it->is_number_integer()) bad("dimension", "expected an integer");
    N = it->get<int>();
    if (N != 1 && N != 2) bad("dimension", "must be 1 or 2, got " + std::to_string(N));
  }
  RunConfig c = default_config(N);
  {
    Reader r(j, "");
    r.integer("dimension", c.N);
    if (auto g = r.get("grid")) {
      Reader rg(*g, "grid");
      rg.num("h", c.h);
      rg.num("R", c.R);
      rg.finish();
    }
    if (auto t = r.get("tolerances")) {
      Reader rt(*t, "tolerances");
      rt.num("quad_tol", c.quad_tol);
      rt.num("tail_tol", c.tail_tol);
      rt.num("resid_tol", c.resid_tol);
      rt.finish();
    }
    r.integer("kmax", c.kmax);
    r.list("n_list", c.n_list);
    if (auto o = r.get("output")) {
      Reader ro(*o, "output");
      ro.str("dir", c.out_dir);
      ro.boolean("deterministic", c.deterministic);
      ro.finish();
    }
    if (auto b = r.get("branch")) {
      Reader rb(*b, "branch");
      rb.integer("k", c.branch.k);
      rb.str("kind", c.branch.kind);
      rb.num("eta", c.branch.eta);
      rb.integer("lattice", c.branch.lattice);
      rb.integer("scan_points", c.branch.scan_points);
      rb.finish();
    }
    if (auto b = r.get("continue")) {
      Reader rc(*b, "continue");
      rc.str("kind", c.cont.kind);
      rc.integer("k", c.cont.k);
      rc.num("radius", c.cont.radius);
      rc.finish();
    }
    if (auto b = r.get("evolve")) {
      Reader re(*b, "evolve");
      re.integer("k", c.evolve.k);
      re.num("sigma", c.evolve.sigma);
      re.list("taus", c.evolve.taus);
      re.finish();
    }
    if (auto b = r.get("profile")) {
      Reader rp(*b, "profile");
      ProfileConfig& p = c.profile;
      rp.num("h_out", p.h_out);
      rp.num("y_max", p.y_max);
      rp.num("rtol", p.rtol);
      rp.num("atol", p.atol);
      rp.num("h_min", p.h_min);
      rp.num("tail_tol", p.tail_tol);
      rp.integer("tail_nodes", p.tail_nodes);
      rp.integer("max_iter", p.max_iter);
      rp.integer("max_segments", p.max_segments);
      rp.num("blowup_L", p.blowup_L);
      rp.num("growth_margin", p.growth_margin);
      rp.num("alpha_tol", p.alpha_tol);
      rp.integer("secant_max", p.secant_max);
      rp.finish();
    }
    r.finish();
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.N != 1 && c.N != 2) bad("dimension", "must be 1 or 2");
  positive("grid.h", c.h);
  positive("grid.R", c.R);
  if (c.R < 4 * c.h) bad("grid.R", "must span at least 4 grid cells");
  positive("tolerances.quad_tol", c.quad_tol);
  positive("tolerances.tail_tol", c.tail_tol);
  positive("tolerances.resid_tol", c.resid_tol);
  int kcap = c.N == 1 ? 8 : 6;
  if (c.kmax < 0 || c.kmax > kcap) bad("kmax", "must be in [0, " + std::to_string(kcap) + "]");
  if (c.n_list.empty()) bad("n_list", "must not be empty");
  for (double n : c.n_list)
    if (!(n > 0 && n <= 0.5)) bad("n_list", "entries must lie in (0, 0.5], got " + fmt(n));
  if (c.out_dir.empty()) bad("output.dir", "must not be empty");
  int bcap = c.N == 1 ? 5 : 2;
  if (c.branch.k < 0 || c.branch.k > bcap) bad("branch.k", "must be in [0, " + std::to_string(bcap) + "] for this dimension");
  try {
    parse_kind(c.branch.kind);
  } catch (const Error&) {
    bad("branch.kind", "must be global or blowup, got '" + c.branch.kind + "'");
  }
  if (!std::isfinite(c.branch.eta) || c.branch.eta == 0) bad("branch.eta", "must be finite and nonzero");
  if (c.branch.lattice < 0 || c.branch.lattice == 1) bad("branch.lattice", "must be 0 or at least 2");
  if (c.branch.scan_points < 10) bad("branch.scan_points", "must be at least 10");
  try {
    parse_kind(c.cont.kind);
  } catch (const Error&) {
    bad("continue.kind", "must be global or blowup, got '" + c.cont.kind + "'");
  }
  if (c.cont.k < 0 || c.cont.k > 2) bad("continue.k", "must be 0, 1 or 2");
  if (c.cont.kind == "global" && c.cont.k != 0) bad("continue.k", "global continuation supports k = 0 only");
  positive("continue.radius", c.cont.radius);
  if (c.evolve.k < 0 || c.evolve.k > 3) bad("evolve.k", "must be in [0, 3]");
  positive("evolve.sigma", c.evolve.sigma);
  if (c.evolve.taus.size() < 2) bad("evolve.taus", "need at least two times");
  for (double t : c.evolve.taus)
    if (!(t >= 0) || !std::isfinite(t)) bad("evolve.taus", "times must be non-negative");
  const ProfileConfig& p = c.profile;
  positive("profile.h_out", p.h_out);
  positive("profile.y_max", p.y_max);
  positive("profile.rtol", p.rtol);
  positive("profile.atol", p.atol);
  positive("profile.h_min", p.h_min);
  positive("profile.tail_tol", p.tail_tol);
  if (p.tail_nodes < 1) bad("profile.tail_nodes", "must be at least 1");
  if (p.max_iter < 1) bad("profile.max_iter", "must be at least 1");
  if (p.max_segments < 1) bad("profile.max_segments", "must be at least 1");
  positive("profile.blowup_L", p.blowup_L);
  positive("profile.growth_margin", p.growth_margin);
  positive("profile.alpha_tol", p.alpha_tol);
  if (p.secant_max < 1) bad("profile.secant_max", "must be at least 1");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("--config", "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("--config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

std::string base64_encode(const std::vector<double>& v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const char*, 6, 8>>;
  const char* b = reinterpret_cast<const char*>(v.data());
  std::size_t n = v.size() * sizeof(double);
  std::string s(It(b), It(b + n));
  s.append((3 - n % 3) % 3, '=');
  return s;
}

std::vector<double> base64_decode(const std::string& s) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
  std::size_t pad = 0;
  while (pad < s.size() && s[s.size() - 1 - pad] == '=') ++pad;
  std::string body = s.substr(0, s.size() - pad);
  std::string bytes(It(body.begin()), It(body.end()));
  if (bytes.size() % sizeof(double) != 0) throw Error(ErrorKind::ConfigError, "base64 payload is not a double array");
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

Json table_to_json(const KernelTable& t) {
  Json j;
  j["dimension"] = t.grid.N;
  j["grid"] = {{"h", t.grid.h}, {"R", t.grid.R}, {"radial", t.grid.radial}, {"per_axis", t.grid.per_axis()}};
  j["K"] = t.K;
  Json orders = Json::array(), values = Json::array();
  for (const auto& [b, v] : t.values) {
    orders.push_back(b.c);
    values.push_back(base64_encode(v));
  }
  j["orders"] = orders;
  j["values"] = values;
  j["decay"] = {{"D", t.D_fit}, {"d", t.d_fit}};
  return j;
}

KernelTable table_from_json(const Json& j) {
  try {
    KernelTable t;
    const Json& g = j.at("grid");
    t.grid = Grid::make(j.at("dimension").get<int>(), g.at("h").get<double>(), g.at("R").get<double>(),
                        g.at("radial").get<bool>());
    t.K = j.at("K").get<int>();
    const Json& o = j.at("orders");
    const Json& v = j.at("values");
    if (o.size() != v.size()) throw Error(ErrorKind::ConfigError, "orders and values differ in length");
    for (std::size_t i = 0; i < o.size(); ++i) {
      auto vals = base64_decode(v[i].get<std::string>());
      if (vals.size() != t.grid.size()) throw Error(ErrorKind::GridMismatch, "slice size does not match the grid");
      t.values[MultiIndex(o[i].get<std::vector<int>>())] = std::move(vals);
    }
    t.D_fit = j.at("decay").at("D").get<double>();
    t.d_fit = j.at("decay").at("d").get<double>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("kernel table: ") + e.what());
  }
}

Json polynomial_to_json(const SparsePolynomial& p) {
  Json j;
  j["dimension"] = p.N;
  j["normalizer_factorial"] = p.normalizer;
  Json terms = Json::array();
  for (const auto& [b, c] : p.terms)
    terms.push_back({{"beta", b.c},
                     {"num", boost::multiprecision::numerator(c).str()},
                     {"den", boost::multiprecision::denominator(c).str()}});
  j["terms"] = terms;
  return j;
}

SparsePolynomial polynomial_from_json(const Json& j) {
  try {
    SparsePolynomial p(j.at("dimension").get<int>());
    p.normalizer = j.at("normalizer_factorial").get<std::uint64_t>();
    for (const auto& t : j.at("terms")) {
      boost::multiprecision::cpp_int num(t.at("num").get<std::string>()), den(t.at("den").get<std::string>());
      p.add_term(MultiIndex(t.at("beta").get<std::vector<int>>()), Rational(num, den));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("polynomial: ") + e.what());
  }
}

std::string fmt(double x) {
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::setprecision(17) << x;
  return o.str();
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
  if (!out_) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::operator<<(double x) { return *this << fmt(x); }
CsvWriter& CsvWriter::operator<<(int x) { return *this << std::to_string(x); }
CsvWriter& CsvWriter::operator<<(const std::string& s) {
  if (!first_) out_ << ",";
  out_ << s;
  first_ = false;
  return *this;
}
void CsvWriter::end_row() {
  out_ << "\n";
  first_ = true;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("parse error in '") + path + "': " + e.what());
  }
}

}  // namespace tfe
