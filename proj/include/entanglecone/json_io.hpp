#pragma once

// JSON encodings of matrices, maps, states and analysis reports.
//
//   Matrix   {"rows": r, "cols": c, "entries": [[re, im], ...]}   row-major
//   Map      {"dim_in": n, "dim_out": m, "repr": "choi"|"kraus"|"holevo", ...}
//   State    {"dims": [n, m], "density": Matrix}
//            {"dims": [n, m], "repr": "ensemble", "terms": [{"weight", "a", "b"}]}
//
// Doubles are emitted in shortest round-trip form and object keys in a fixed
// order, so equal inputs give byte-identical output.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "entanglecone/classify.hpp"
#include "json.hpp"

namespace entanglecone::io {

using Json = nlohmann::ordered_json;

// ---- matrices -------------------------------------------------------------

inline Json to_json(const Matrix& x) {
  Json entries = Json::array();
  for (const Complex& z : x.entries()) entries.push_back(Json::array({z.real(), z.imag()}));
  return Json{{"rows", x.rows()}, {"cols", x.cols()}, {"entries", std::move(entries)}};
}

inline Json to_json(std::span<const Complex> v) { return to_json(Matrix::column(v)); }

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::size_t positive_size(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ParseError(std::string("field '") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace detail

inline Matrix matrix_from_json(const Json& j) {
  const std::size_t rows = detail::positive_size(j, "rows");
  const std::size_t cols = detail::positive_size(j, "cols");
  const Json& entries = detail::field(j, "entries");
  if (!entries.is_array() || entries.size() != rows * cols) {
    throw ParseError("matrix 'entries' must hold rows*cols = " + std::to_string(rows * cols) + " items");
  }
  std::vector<Complex> data;
  data.reserve(entries.size());
  for (const Json& e : entries) {
    if (!e.is_array() || e.size() != 2) throw ParseError("matrix entries must be [re, im] pairs");
    data.emplace_back(detail::number(e[0], "real part"), detail::number(e[1], "imaginary part"));
  }
  try {
    return Matrix(rows, cols, std::move(data));
  } catch (const DomainError& ex) {
    throw ParseError(ex.what());
  }
}

// ---- maps -----------------------------------------------------------------

inline Json to_json(const HolevoForm& hf) {
  Json terms = Json::array();
  for (const auto& t : hf.terms) terms.push_back(Json{{"omega", to_json(t.omega_density)}, {"b", to_json(t.b)}});
  return terms;
}

inline Json to_json(const MatrixMap& f) {
  Json j{{"dim_in", f.dim_in()}, {"dim_out", f.dim_out()}};
  if (const KrausList* ks = f.kraus()) {
    j["repr"] = "kraus";
    Json list = Json::array();
    for (const Matrix& v : *ks) list.push_back(to_json(v));
    j["kraus"] = std::move(list);
  } else if (const HolevoForm* hf = f.holevo()) {
    j["repr"] = "holevo";
    j["terms"] = to_json(*hf);
  } else {
    j["repr"] = "choi";
  }
  j["choi"] = to_json(f.choi());
  return j;
}

inline MatrixMap map_from_json(const Json& j, const Tolerances& tol = {}) {
  const std::size_t n = detail::positive_size(j, "dim_in");
  const std::size_t m = detail::positive_size(j, "dim_out");
  const Json& repr = detail::field(j, "repr");
  if (!repr.is_string()) throw ParseError("'repr' must be a string");
  const std::string kind = repr.get<std::string>();
  std::optional<MatrixMap> f;
  try {
    if (kind == "choi") {
      f = MatrixMap(n, m, matrix_from_json(detail::field(j, "choi")), ChoiGiven{}, tol);
    } else if (kind == "kraus") {
      const Json& list = detail::field(j, "kraus");
      if (!list.is_array() || list.empty()) throw ParseError("'kraus' must be a nonempty array");
      KrausList ks;
      for (const Json& v : list) ks.push_back(matrix_from_json(v));
      f = kraus_to_map(ks, tol);
    } else if (kind == "holevo") {
      const Json& terms = detail::field(j, "terms");
      if (!terms.is_array() || terms.empty()) throw ParseError("'terms' must be a nonempty array");
      HolevoForm hf;
      for (const Json& t : terms) {
        hf.terms.push_back({matrix_from_json(detail::field(t, "omega")), matrix_from_json(detail::field(t, "b"))});
      }
      f = holevo_to_map(hf, tol);
    } else {
      throw ParseError("unknown map repr '" + kind + "'");
    }
  } catch (const DimensionError& ex) {
    throw ParseError(ex.what());
  } catch (const DomainError& ex) {
    throw ParseError(ex.what());
  }
  if (f->dim_in() != n || f->dim_out() != m) throw ParseError("map payload does not match dim_in/dim_out");
  if (kind != "choi" && j.contains("choi")) {
    const Matrix stated = matrix_from_json(j.at("choi"));
    if (stated.rows() != f->choi().rows() || stated.cols() != f->choi().cols() ||
        frobenius_norm(stated - f->choi()) > 1e-9 * std::max(1.0, frobenius_norm(f->choi()))) {
      throw ParseError("stated Choi matrix disagrees with the " + kind + " payload");
    }
  }
  return *f;
}

// ---- states ---------------------------------------------------------------

inline Json to_json(const BipartiteState& s) {
  return Json{{"dims", Json::array({s.dims().n, s.dims().m})}, {"density", to_json(s.density())}};
}

inline Json to_json(const SeparableEnsemble& ens) {
  Json terms = Json::array();
  for (const auto& t : ens.terms) terms.push_back(Json{{"weight", t.weight}, {"a", to_json(t.a)}, {"b", to_json(t.b)}});
  return Json{{"dims", Json::array({ens.dims().n, ens.dims().m})}, {"repr", "ensemble"}, {"terms", std::move(terms)}};
}

struct LoadedState {
  BipartiteState state;
  std::optional<SeparableEnsemble> ensemble;
};

// Accepts a state envelope, or any object carrying one under "state" (such
// as a search result).
inline LoadedState state_from_json(const Json& j, const Tolerances& tol = {}) {
  if (j.is_object() && j.contains("state") && !j.contains("dims")) return state_from_json(j.at("state"), tol);
  const Json& dims = detail::field(j, "dims");
  if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() || !dims[1].is_number_integer() ||
      dims[0].get<long long>() <= 0 || dims[1].get<long long>() <= 0) {
    throw ParseError("'dims' must be [n, m] with positive integers");
  }
  const Dims d{dims[0].get<std::size_t>(), dims[1].get<std::size_t>()};
  const std::string kind = j.contains("repr") && j.at("repr").is_string() ? j.at("repr").get<std::string>() : "density";
  try {
    if (kind == "density") return {BipartiteState(d, matrix_from_json(detail::field(j, "density")), tol), std::nullopt};
    if (kind == "ensemble") {
      const Json& terms = detail::field(j, "terms");
      if (!terms.is_array() || terms.empty()) throw ParseError("'terms' must be a nonempty array");
      SeparableEnsemble ens;
      for (const Json& t : terms) {
        ens.terms.push_back({detail::number(detail::field(t, "weight"), "weight"),
                             matrix_from_json(detail::field(t, "a")), matrix_from_json(detail::field(t, "b"))});
      }
      ens.validate(tol);
      if (ens.dims() != d) throw ParseError("ensemble factor sizes do not match 'dims'");
      return {BipartiteState(d, ens.density(), tol), std::move(ens)};
    }
  } catch (const DimensionError& ex) {
    throw ParseError(ex.what());
  } catch (const DomainError& ex) {
    throw ParseError(ex.what());
  }
  throw ParseError("unknown state repr '" + kind + "'");
}

inline SeparableEnsemble ensemble_from_json(const Json& j, const Tolerances& tol = {}) {
  LoadedState loaded = state_from_json(j, tol);
  if (!loaded.ensemble) throw ParseError("expected a state with \"repr\": \"ensemble\"");
  return std::move(*loaded.ensemble);
}

// ---- reports --------------------------------------------------------------

inline Json to_json(const PsdResult& r) {
  Json j{{"verdict", r.psd}, {"min_eigenvalue", r.min_eigenvalue}};
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const WitnessCertificate& w) {
  return Json{{"witness", w.witness}, {"eigenvalue", w.eigenvalue}, {"vector", to_json(w.vector)}};
}

inline Json to_json(const MapClassReport& r) {
  Json j;
  j["cp"] = r.cp.psd;
  j["copositive"] = r.copositive.psd;
  j["block_min"] = r.block.value;
  j["positive_verdict"] = to_string(r.positive_verdict);
  j["eb_verdict"] = to_string(r.eb_verdict);
  j["certificates"] = Json{
      {"cp", to_json(r.cp)},
      {"copositive", to_json(r.copositive)},
      {"block_argmin",
       Json{{"x", to_json(r.block.x)},
            {"y", to_json(r.block.y)},
            {"restart", r.block.restart},
            {"iterations", r.block.iterations},
            {"converged", r.block.converged}}},
      {"eb_holevo", r.eb_holevo ? to_json(*r.eb_holevo) : Json(nullptr)},
      {"eb_witness", r.eb_witness ? to_json(*r.eb_witness) : Json(nullptr)},
  };
  return j;
}

inline Json to_json(const PptResult& r) {
  Json j{{"verdict", r.ppt}, {"min_eigenvalue", r.min_eigenvalue}, {"forms_agree", r.forms_agree},
         {"copositive_probes_ok", r.copositive_probes_ok}};
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const StateReport& r) {
  Json j;
  j["ppt"] = r.ppt.ppt;
  j["entanglement"] = to_string(r.entanglement);
  j["peres_crosscheck"] = r.peres_crosscheck;
  j["ppt_detail"] = to_json(r.ppt);
  j["entangled_by"] = r.entangled_by ? to_json(*r.entangled_by) : Json(nullptr);
  j["separable_by"] = r.separable_by ? to_json(*r.separable_by) : Json(nullptr);
  j["skipped"] = r.skipped;
  return j;
}

inline Json to_json(const BlockDecomposition& b) {
  Json comps = Json::array();
  for (const auto& c : b.components) {
    comps.push_back(Json{{"indices", c.indices},
                         {"weight", c.weight},
                         {"e", to_json(c.e)},
                         {"f", to_json(c.f)},
                         {"state", to_json(c.state)}});
  }
  return Json{{"component_count", b.components.size()},
              {"components", std::move(comps)},
              {"max_cross_overlap", b.max_cross_overlap},
              {"reconstruction_error", b.reconstruction_error}};
}

inline Json to_json(const SearchResult& r) {
  return Json{{"witness", r.witness},
              {"violation", r.violation},
              {"violation_vector", to_json(r.violation_vector)},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"restart", r.restart},
              {"seed", r.seed},
              {"state", to_json(r.state)}};
}

// ---- files ----------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("'" + path + "': " + ex.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace entanglecone::io
