#pragma once

// Descriptor files: one JSON document per structure. Complex numbers are
// [re, im] pairs, matrices are row-major arrays of rows, filtrations map
// level strings to arrays of basis vectors. Validation errors carry the
// offending field path.

#include "terp/sinh_gordon.hpp"
#include "terp/stokes.hpp"
#include "terp/terp_structure.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <variant>

namespace terp {

using nlohmann::json;

struct DescriptorError : std::runtime_error {
  explicit DescriptorError(const std::string& what) : std::runtime_error(what) {}
};

struct AdeDescriptor {
  ade::Kind kind = ade::Kind::A;
  int rank = 1;
};

struct SinhDescriptor {
  double amplitude = 0.0;
  SolverConfig config;
};

struct ParsedDescriptor {
  std::string kind;
  std::optional<TerpData> terp;
  std::optional<StokesData> stokes;
  std::optional<AdeDescriptor> ade;
  std::optional<SinhDescriptor> sinh;
};

namespace detail {

inline Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw DescriptorError(path + ": expected [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline CMatrix parse_cmatrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw DescriptorError(path + ": expected a non-empty array of rows");
  size_t cols = 0;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array())
      throw DescriptorError(path + "[" + std::to_string(i) + "]: expected a row array");
    if (i == 0)
      cols = j[i].size();
    else if (j[i].size() != cols)
      throw DescriptorError(path + "[" + std::to_string(i) + "]: row length " +
                            std::to_string(j[i].size()) + " != " + std::to_string(cols));
  }
  CMatrix m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i)
    for (size_t k = 0; k < cols; ++k)
      m(i, k) = parse_complex(j[i][k], path + "[" + std::to_string(i) + "][" +
                                           std::to_string(k) + "]");
  return m;
}

inline RMatrix parse_rmatrix(const json& j, const std::string& path) {
  CMatrix c = parse_cmatrix(j, path);
  if (c.imag().norm() > 0.0)
    throw DescriptorError(path + ": expected a real matrix");
  return c.real();
}

inline CVector parse_cvector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw DescriptorError(path + ": expected a non-empty vector");
  CVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(i) = parse_complex(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// vectors listed as rows of components; stored as basis columns
inline CMatrix parse_vector_list(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw DescriptorError(path + ": expected an array of vectors");
  CMatrix m(n, j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    CVector v = parse_cvector(j[i], path + "[" + std::to_string(i) + "]");
    if (v.size() != n)
      throw DescriptorError(path + "[" + std::to_string(i) + "]: vector length " +
                            std::to_string(v.size()) + " != n = " + std::to_string(n));
    m.col(i) = v;
  }
  return m;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json cmatrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j2 = 0; j2 < m.cols(); ++j2) row.push_back(complex_to_json(m(i, j2)));
    rows.push_back(row);
  }
  return rows;
}

inline json rmatrix_to_json(const RMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j2 = 0; j2 < m.cols(); ++j2) row.push_back(m(i, j2));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline TerpData parse_terp_payload(const json& p, const Tolerance& tol) {
  TerpData t;
  if (!p.contains("n") || !p["n"].is_number_integer())
    throw DescriptorError("payload.n: expected an integer dimension");
  int n = p["n"].get<int>();
  if (!p.contains("w") || !p["w"].is_number_integer())
    throw DescriptorError("payload.w: expected an integer weight");
  t.w = p["w"].get<int>();
  if (!p.contains("monodromy")) throw DescriptorError("payload.monodromy: missing");
  const json& mono = p["monodromy"];
  t.monodromy.ms = detail::parse_rmatrix(mono.at("semisimple"), "payload.monodromy.semisimple");
  t.monodromy.n = detail::parse_rmatrix(mono.at("nilpotent"), "payload.monodromy.nilpotent");
  if (t.monodromy.ms.rows() != n || t.monodromy.n.rows() != n)
    throw DescriptorError("payload.monodromy: matrix size != n");
  if (!mono.contains("eigen_classes") || !mono["eigen_classes"].is_array())
    throw DescriptorError("payload.monodromy.eigen_classes: expected an array");
  for (size_t i = 0; i < mono["eigen_classes"].size(); ++i) {
    const json& cj = mono["eigen_classes"][i];
    std::string path = "payload.monodromy.eigen_classes[" + std::to_string(i) + "]";
    EigenClass cls;
    cls.alpha0 = detail::parse_complex(cj.at("alpha"), path + ".alpha");
    cls.basis = detail::parse_vector_list(cj.at("basis"), n, path + ".basis");
    t.monodromy.classes.push_back(std::move(cls));
  }
  t.s = detail::parse_cmatrix(p.at("pairing"), "payload.pairing");
  if (!p.contains("filtration") || !p["filtration"].is_object())
    throw DescriptorError("payload.filtration: expected an object {level: [vectors]}");
  std::map<int, CMatrix> jumps;
  for (auto it = p["filtration"].begin(); it != p["filtration"].end(); ++it) {
    int level = 0;
    try {
      level = std::stoi(it.key());
    } catch (...) {
      throw DescriptorError("payload.filtration: level key '" + it.key() +
                            "' is not an integer");
    }
    jumps[level] =
        detail::parse_vector_list(it.value(), n, "payload.filtration." + it.key());
  }
  t.f = Filtration(n, std::move(jumps));
  t.validate(tol);
  return t;
}

inline StokesData parse_stokes_payload(const json& p, const Tolerance& tol) {
  StokesData d;
  d.w = p.at("w").get<int>();
  if (!p.contains("u") || !p["u"].is_array())
    throw DescriptorError("payload.u: expected an array of eigenvalues");
  for (size_t i = 0; i < p["u"].size(); ++i)
    d.u.push_back(detail::parse_complex(p["u"][i], "payload.u[" + std::to_string(i) + "]"));
  d.xi = detail::parse_complex(p.at("xi"), "payload.xi");
  if (std::abs(std::abs(d.xi) - 1.0) > 1e-9)
    throw DescriptorError("payload.xi: must have unit modulus");
  d.t = detail::parse_cmatrix(p.at("T"), "payload.T");
  const int n = static_cast<int>(d.u.size());
  if (d.t.rows() != n || d.t.cols() != n)
    throw DescriptorError("payload.T: size does not match the eigenvalue count");
  for (int i = 0; i < n; ++i) {
    if (std::abs(d.t(i, i) - 1.0) > 1e-12)
      throw DescriptorError("payload.T: diagonal entry is not 1");
    for (int j = 0; j < i; ++j)
      if (std::abs(d.t(i, j)) > 1e-12)
        throw DescriptorError("payload.T: not upper triangular");
  }
  for (size_t i = 0; i < d.u.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (std::abs(d.u[i] - d.u[j]) < tol.rel)
        throw DescriptorError("payload.u: eigenvalues must be pairwise distinct");
  if (is_stokes_direction(d.u, d.xi, tol))
    throw DescriptorError("payload.xi: is a Stokes direction for the given u");
  return d;
}

inline AdeDescriptor parse_ade_payload(const json& p) {
  AdeDescriptor a;
  std::string type = p.at("type").get<std::string>();
  if (type.size() != 1) throw DescriptorError("payload.type: expected 'A', 'D' or 'E'");
  a.kind = ade::kind_from_char(type[0]);
  a.rank = p.at("rank").get<int>();
  return a;
}

inline SinhDescriptor parse_sinh_payload(const json& p) {
  SinhDescriptor s;
  s.amplitude = p.at("amplitude").get<double>();
  if (p.contains("r_max")) s.config.r_max = p["r_max"].get<double>();
  if (p.contains("r_min")) s.config.r_min = p["r_min"].get<double>();
  if (p.contains("rel_tol")) s.config.rel_tol = p["rel_tol"].get<double>();
  if (p.contains("abs_tol")) s.config.abs_tol = p["abs_tol"].get<double>();
  if (p.contains("blowup_threshold"))
    s.config.blowup_threshold = p["blowup_threshold"].get<double>();
  if (p.contains("direction")) {
    std::string d = p["direction"].get<std::string>();
    if (d == "inward") s.config.direction = SweepDirection::inward;
    else if (d == "outward") s.config.direction = SweepDirection::outward;
    else throw DescriptorError("payload.direction: expected 'inward' or 'outward'");
  }
  s.config.validate();
  return s;
}

inline ParsedDescriptor parse_descriptor(const json& j, const Tolerance& tol = {}) {
  ParsedDescriptor out;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw DescriptorError("kind: missing or not a string");
  out.kind = j["kind"].get<std::string>();
  if (!j.contains("payload")) throw DescriptorError("payload: missing");
  const json& p = j["payload"];
  if (out.kind == "terp")
    out.terp = parse_terp_payload(p, tol);
  else if (out.kind == "stokes")
    out.stokes = parse_stokes_payload(p, tol);
  else if (out.kind == "ade")
    out.ade = parse_ade_payload(p);
  else if (out.kind == "sinh_gordon")
    out.sinh = parse_sinh_payload(p);
  else
    throw DescriptorError("kind: unknown descriptor kind '" + out.kind + "'");
  return out;
}

inline ParsedDescriptor load_descriptor(const std::string& path,
                                        const Tolerance& tol = {}) {
  std::ifstream in(path);
  if (!in) throw DescriptorError("cannot open descriptor file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DescriptorError(path + ": " + e.what());
  }
  return parse_descriptor(j, tol);
}

inline json terp_to_json(const TerpData& t) {
  json p;
  p["n"] = t.dim();
  p["w"] = t.w;
  json mono;
  mono["semisimple"] = detail::rmatrix_to_json(t.monodromy.ms);
  mono["nilpotent"] = detail::rmatrix_to_json(t.monodromy.n);
  json classes = json::array();
  for (const auto& cls : t.monodromy.classes) {
    json cj;
    cj["alpha"] = detail::complex_to_json(cls.alpha0);
    json basis = json::array();
    for (int c = 0; c < cls.basis.cols(); ++c) {
      json v = json::array();
      for (int r = 0; r < cls.basis.rows(); ++r)
        v.push_back(detail::complex_to_json(cls.basis(r, c)));
      basis.push_back(v);
    }
    cj["basis"] = basis;
    classes.push_back(cj);
  }
  mono["eigen_classes"] = classes;
  p["monodromy"] = mono;
  p["pairing"] = detail::cmatrix_to_json(t.s);
  json filt;
  for (const auto& [level, basis] : t.f.jumps()) {
    json vecs = json::array();
    for (int c = 0; c < basis.cols(); ++c) {
      json v = json::array();
      for (int r = 0; r < basis.rows(); ++r)
        v.push_back(detail::complex_to_json(basis(r, c)));
      vecs.push_back(v);
    }
    filt[std::to_string(level)] = vecs;
  }
  p["filtration"] = filt;
  return json{{"kind", "terp"}, {"payload", p}};
}

inline json stokes_to_json(const StokesData& d) {
  json p;
  p["w"] = d.w;
  json u = json::array();
  for (Complex z : d.u) u.push_back(detail::complex_to_json(z));
  p["u"] = u;
  p["xi"] = detail::complex_to_json(d.xi);
  p["T"] = detail::cmatrix_to_json(d.t);
  return json{{"kind", "stokes"}, {"payload", p}};
}

}  // namespace terp
