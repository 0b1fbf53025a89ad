#include "wncs/scenario_io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wncs/errors.hpp"

namespace wncs {

using nlohmann::json;

namespace {

class Reader {
 public:
  void issue(const std::string& path, const std::string& what) {
    issues_.push_back(path + ": " + what);
    reported_.insert(path);
  }

  bool reported(const std::string& path) const {
    for (const auto& p : reported_) {
      if (path == p || path.starts_with(p + ".") || path.starts_with(p + "[")) return true;
    }
    return false;
  }

  std::vector<std::string>& issues() { return issues_; }

  void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) issue(join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  const json* require(const json& obj, std::string_view key, const std::string& path) {
    auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      issue(join(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> real(const json& j, const std::string& path) {
    if (!j.is_number()) {
      issue(path, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<long> integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      issue(path, "expected an integer");
      return std::nullopt;
    }
    return j.get<long>();
  }

  std::optional<Vector> vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
      issue(path, "expected a non-empty array of numbers");
      return std::nullopt;
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        issue(path + "[" + std::to_string(i) + "]", "expected a number");
        return std::nullopt;
      }
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
  }

  std::optional<Matrix> matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
      issue(path, "expected a non-empty array of rows");
      return std::nullopt;
    }
    const auto rows = j.size();
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row_path = path + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || j[r].empty()) {
        issue(row_path, "expected a non-empty array of numbers");
        return std::nullopt;
      }
      if (r == 0) cols = j[r].size();
      if (j[r].size() != cols) {
        issue(row_path, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                            std::to_string(cols));
        return std::nullopt;
      }
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number()) {
          issue(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                "expected a number");
          return std::nullopt;
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
      }
    }
    return m;
  }

 private:
  std::vector<std::string> issues_;
  std::set<std::string> reported_;
};

PolicyConfig read_policy(Reader& rd, const json& j, const std::string& path) {
  PolicyConfig policy;
  if (!j.is_object()) {
    rd.issue(path, "expected an object");
    return policy;
  }
  rd.check_keys(j, {"scheme", "threshold"}, path);
  if (const json* s = rd.require(j, "scheme", path)) {
    if (!s->is_string()) {
      rd.issue(path + ".scheme", "expected a string");
    } else {
      try {
        policy.scheme = parse_scheme(s->get<std::string>());
      } catch (const ConfigError& e) {
        rd.issue(path + ".scheme", e.what());
      }
    }
  }
  if (auto it = j.find("threshold"); it != j.end()) {
    if (auto t = rd.real(*it, path + ".threshold")) policy.threshold = *t;
  }
  return policy;
}

SubsystemModel read_subsystem(Reader& rd, const json& j, const std::string& path,
                              PolicyConfig& policy) {
  SubsystemModel model;
  if (!j.is_object()) {
    rd.issue(path, "expected an object");
    return model;
  }
  rd.check_keys(j, {"A", "B", "C", "Q", "R", "W", "V", "x0_mean", "x0_cov", "q_link", "policy"},
                path);
  auto mat = [&](std::string_view key, Matrix& out) {
    if (const json* v = rd.require(j, key, path)) {
      if (auto m = rd.matrix(*v, Reader::join(path, key))) out = std::move(*m);
    }
  };
  mat("A", model.a);
  mat("B", model.b);
  mat("C", model.c);
  mat("Q", model.q);
  mat("R", model.r);
  mat("W", model.w);
  mat("V", model.v);

  const Eigen::Index n = model.a.rows();
  model.x0_mean = Vector::Zero(n);
  model.x0_cov = Matrix::Zero(n, n);
  if (auto it = j.find("x0_mean"); it != j.end()) {
    if (auto v = rd.vector(*it, path + ".x0_mean")) model.x0_mean = std::move(*v);
  }
  if (auto it = j.find("x0_cov"); it != j.end()) {
    if (auto m = rd.matrix(*it, path + ".x0_cov")) model.x0_cov = std::move(*m);
  }
  if (const json* q = rd.require(j, "q_link", path)) {
    if (q->is_number()) {
      model.q_link = {q->get<double>()};
    } else if (auto v = rd.vector(*q, path + ".q_link")) {
      model.q_link.assign(v->data(), v->data() + v->size());
    }
  }
  if (auto it = j.find("policy"); it != j.end()) policy = read_policy(rd, *it, path + ".policy");
  return model;
}

void read_network(Reader& rd, const json& j, Scenario& s) {
  const std::string path = "network";
  if (!j.is_object()) {
    rd.issue(path, "expected an object");
    return;
  }
  rd.check_keys(j, {"dynamic_bits", "static_bits", "alpha", "dominant_bit", "channels", "static_ids"},
                path);
  auto int_field = [&](std::string_view key, auto& out) {
    if (auto it = j.find(std::string(key)); it != j.end()) {
      if (auto v = rd.integer(*it, Reader::join(path, key))) {
        out = static_cast<std::remove_reference_t<decltype(out)>>(*v);
      }
    }
  };
  int_field("dynamic_bits", s.layout.dynamic_bits);
  int_field("static_bits", s.layout.static_bits);
  int_field("dominant_bit", s.layout.dominant_bit);
  if (auto it = j.find("channels"); it != j.end()) {
    if (auto v = rd.integer(*it, "network.channels")) {
      if (*v < 1) {
        rd.issue("network.channels", "must be at least 1");
      } else {
        s.channels = static_cast<std::size_t>(*v);
      }
    }
  }
  if (auto it = j.find("alpha"); it != j.end()) {
    if (auto v = rd.real(*it, "network.alpha")) s.layout.alpha = *v;
  }
  if (auto it = j.find("static_ids"); it != j.end()) {
    if (!it->is_array()) {
      rd.issue("network.static_ids", "expected an array of integers");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto p = "network.static_ids[" + std::to_string(i) + "]";
        if (auto v = rd.integer((*it)[i], p)) {
          if (*v < 0) {
            rd.issue(p, "must be nonnegative");
          } else {
            s.static_ids.push_back(static_cast<Identifier>(*v));
          }
        }
      }
    }
  }
}

void read_sweep(Reader& rd, const json& j, Scenario& s) {
  if (!j.is_object()) {
    rd.issue("sweep", "expected an object mapping scheme to thresholds");
    return;
  }
  for (const auto& [key, value] : j.items()) {
    const std::string path = "sweep." + key;
    Scheme scheme;
    try {
      scheme = parse_scheme(key);
    } catch (const ConfigError& e) {
      rd.issue(path, e.what());
      continue;
    }
    if (!value.is_array()) {
      rd.issue(path, "expected an array of thresholds");
      continue;
    }
    auto& out = s.sweep[scheme];
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (auto t = rd.real(value[i], path + "[" + std::to_string(i) + "]")) out.push_back(*t);
    }
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

Scenario parse_scenario_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("document: ") + e.what());
  }
  Reader rd;
  Scenario s;
  if (!doc.is_object()) throw ConfigError("document: expected a JSON object");
  rd.check_keys(doc, {"subsystems", "network", "horizon", "trials", "seed", "sweep"}, "");

  if (const json* subs = rd.require(doc, "subsystems", "")) {
    if (!subs->is_array()) {
      rd.issue("subsystems", "expected an array");
    } else {
      for (std::size_t i = 0; i < subs->size(); ++i) {
        PolicyConfig policy;
        auto model = read_subsystem(rd, (*subs)[i], "subsystems[" + std::to_string(i) + "]", policy);
        model.index = static_cast<int>(i) + 1;
        s.subsystems.push_back(std::move(model));
        s.policies.push_back(policy);
      }
    }
  }
  if (auto it = doc.find("network"); it != doc.end()) read_network(rd, *it, s);
  if (const json* h = rd.require(doc, "horizon", "")) {
    if (auto v = rd.integer(*h, "horizon")) s.horizon = *v;
  }
  if (const json* t = rd.require(doc, "trials", "")) {
    if (auto v = rd.integer(*t, "trials")) s.trials = *v;
  }
  if (const json* sd = rd.require(doc, "seed", "")) {
    if (!sd->is_number_unsigned() && !(sd->is_number_integer() && sd->get<long>() >= 0)) {
      rd.issue("seed", "expected a nonnegative integer");
    } else {
      s.seed = sd->get<std::uint64_t>();
    }
  }
  if (auto it = doc.find("sweep"); it != doc.end()) read_sweep(rd, *it, s);

  // Semantic checks; skip anything already reported structurally.
  for (auto& issue : validate(s)) {
    const auto path = issue.substr(0, issue.find(':'));
    if (!rd.reported(path)) rd.issues().push_back(std::move(issue));
  }
  if (!rd.issues().empty()) throw ConfigError(std::move(rd.issues()));
  return s;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

std::vector<std::string> preset_names() { return {"paper-sec5"}; }

Scenario preset_scenario(std::string_view name) {
  if (name != "paper-sec5") {
    throw ConfigError("unknown preset '" + std::string(name) + "' (available: paper-sec5)");
  }
  const Matrix eye = Matrix::Identity(2, 2);
  Scenario s;
  const double a_diag[2][2] = {{1.1, 0.9}, {0.9, 0.9}};
  const double q_link[2] = {0.85, 0.5};
  for (int i = 0; i < 2; ++i) {
    SubsystemModel m;
    m.index = i + 1;
    m.a = Vector{{a_diag[i][0], a_diag[i][1]}}.asDiagonal();
    m.b = eye;
    m.c = eye;
    m.q = eye;
    m.r = 0.01 * eye;
    m.w = 0.1 * eye;
    m.v = 0.01 * eye;
    m.x0_mean = Vector::Zero(2);
    m.x0_cov = 0.1 * eye;
    m.q_link = {q_link[i]};
    s.subsystems.push_back(std::move(m));
    s.policies.push_back({Scheme::kCoIL, 0.0});
  }
  s.layout = IdentifierLayout{20, 9, 1000.0, 1};
  s.channels = 1;
  s.horizon = 1000;
  s.trials = 1000;
  s.seed = 1;
  // Threshold grids spanning attempt rates from 1 down to roughly 0.2.
  s.sweep[Scheme::kSoD] = {0.0, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.4};
  s.sweep[Scheme::kCoIL] = {0.0, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.6};
  s.sweep[Scheme::kVoI] = {0.0, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.13, 0.16, 0.2, 0.25, 0.3, 0.4, 0.5};
  s.sweep[Scheme::kCoILBar] = s.sweep[Scheme::kCoIL];
  return s;
}

Scenario canonicalize(const Scenario& scenario) {
  Scenario s = scenario;
  if (s.static_ids.empty()) {
    for (std::size_t i = 0; i < s.subsystems.size(); ++i) {
      s.static_ids.push_back(default_static_id(s.layout, static_cast<int>(i) + 1));
    }
  }
  for (std::size_t i = 0; i < s.subsystems.size(); ++i) {
    auto& m = s.subsystems[i];
    m.index = static_cast<int>(i) + 1;
    if (m.q_link.size() == 1 && s.channels > 1) m.q_link.assign(s.channels, m.q_link.front());
  }
  return s;
}

std::string serialize_scenario(const Scenario& scenario) {
  json doc;
  doc["horizon"] = scenario.horizon;
  doc["trials"] = scenario.trials;
  doc["seed"] = scenario.seed;
  json network;
  network["dynamic_bits"] = scenario.layout.dynamic_bits;
  network["static_bits"] = scenario.layout.static_bits;
  network["alpha"] = scenario.layout.alpha;
  network["dominant_bit"] = scenario.layout.dominant_bit;
  network["channels"] = scenario.channels;
  if (!scenario.static_ids.empty()) network["static_ids"] = scenario.static_ids;
  doc["network"] = std::move(network);
  json subs = json::array();
  for (std::size_t i = 0; i < scenario.subsystems.size(); ++i) {
    const auto& m = scenario.subsystems[i];
    json j;
    j["A"] = matrix_json(m.a);
    j["B"] = matrix_json(m.b);
    j["C"] = matrix_json(m.c);
    j["Q"] = matrix_json(m.q);
    j["R"] = matrix_json(m.r);
    j["W"] = matrix_json(m.w);
    j["V"] = matrix_json(m.v);
    j["x0_mean"] = vector_json(m.x0_mean);
    j["x0_cov"] = matrix_json(m.x0_cov);
    j["q_link"] = m.q_link;
    if (i < scenario.policies.size()) {
      j["policy"] = {{"scheme", std::string(scheme_name(scenario.policies[i].scheme))},
                     {"threshold", scenario.policies[i].threshold}};
    }
    subs.push_back(std::move(j));
  }
  doc["subsystems"] = std::move(subs);
  if (!scenario.sweep.empty()) {
    json sweep = json::object();
    for (const auto& [scheme, thresholds] : scenario.sweep) {
      sweep[std::string(scheme_name(scheme))] = thresholds;
    }
    doc["sweep"] = std::move(sweep);
  }
  return doc.dump();
}

std::string config_hash(const Scenario& scenario) {
  const std::string text = serialize_scenario(canonicalize(scenario));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

bool same_scenario(const Scenario& a, const Scenario& b) {
  if (a.subsystems.size() != b.subsystems.size() || a.policies != b.policies ||
      a.static_ids != b.static_ids || !(a.layout == b.layout) || a.channels != b.channels ||
      a.horizon != b.horizon || a.trials != b.trials || a.seed != b.seed || a.sweep != b.sweep) {
    return false;
  }
  for (std::size_t i = 0; i < a.subsystems.size(); ++i) {
    const auto& x = a.subsystems[i];
    const auto& y = b.subsystems[i];
    if (x.index != y.index || x.q_link != y.q_link || !same_matrix(x.a, y.a) ||
        !same_matrix(x.b, y.b) || !same_matrix(x.c, y.c) || !same_matrix(x.q, y.q) ||
        !same_matrix(x.r, y.r) || !same_matrix(x.w, y.w) || !same_matrix(x.v, y.v) ||
        !same_matrix(x.x0_cov, y.x0_cov) || x.x0_mean.size() != y.x0_mean.size() ||
        (x.x0_mean.size() > 0 && x.x0_mean != y.x0_mean)) {
      return false;
    }
  }
  return true;
}

}  // namespace wncs
