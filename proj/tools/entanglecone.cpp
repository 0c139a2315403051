// Command-line front end: entanglecone <command> [options] inputs...
//
// Exit codes: 0 ok, 1 usage, 2 parse, 3 numerical, 4 search found nothing.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "entanglecone/entanglecone.hpp"
#include "entanglecone/json_io.hpp"

namespace ec = entanglecone;
using ec::io::Json;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kParse = 2, kNumerical = 3, kNotFound = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> iterations;
  std::optional<double> tol_psd;
  std::string format = "json";
  std::string out;
  std::vector<std::string> inputs;

  ec::Tolerances tolerances() const {
    ec::Tolerances tol;
    if (tol_psd) tol.psd_slack = *tol_psd;
    try {
      tol.validate();
    } catch (const ec::DomainError& e) {
      throw UsageError(e.what());
    }
    return tol;
  }

  template <class B>
  B budget() const {
    B b;
    if (restarts) b.restarts = *restarts;
    if (iterations) b.iterations = *iterations;
    if (b.restarts == 0 || b.iterations == 0) throw UsageError("budgets must be positive");
    return b;
  }
};

// ENTANGLECONE_THREADS caps internal parallelism; 0 means serial.
unsigned threads_from_env() {
  if (const char* v = std::getenv("ENTANGLECONE_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(v));
    } catch (const std::exception&) {
      throw UsageError("ENTANGLECONE_THREADS must be a non-negative integer");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
}

ec::MatrixMap load_map(const std::string& spec, const ec::Tolerances& tol) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.starts_with(prefix)) {
    try {
      return ec::builtin_map(spec.substr(prefix.size()));
    } catch (const ec::DomainError& e) {
      throw UsageError(e.what());
    }
  }
  return ec::io::map_from_json(ec::io::read_json_file(spec), tol);
}

void emit(const RunConfig& cfg, const Json& j, const std::string& text) {
  if (cfg.format == "text") {
    std::cout << text;
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int cmd_choi(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  const ec::MatrixMap f = load_map(cfg.inputs.at(0), tol);
  const Json j = ec::io::to_json(ec::MatrixMap(f.dim_in(), f.dim_out(), f.choi()));
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, j);
  std::ostringstream text;
  text << "dim_in: " << f.dim_in() << "\ndim_out: " << f.dim_out() << "\nchoi:\n";
  for (std::size_t r = 0; r < f.choi().rows(); ++r) {
    for (std::size_t c = 0; c < f.choi().cols(); ++c) {
      const ec::Complex z = f.choi()(r, c);
      text << (c ? " " : "  ") << fmt(z.real()) << (z.imag() < 0 ? "-" : "+") << fmt(std::abs(z.imag())) << "i";
    }
    text << '\n';
  }
  emit(cfg, j, text.str());
  return kOk;
}

int cmd_classify(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  const ec::MatrixMap f = load_map(cfg.inputs.at(0), tol);
  const ec::MapClassReport rep = ec::classify_map(f, cfg.budget<ec::Budget>(), cfg.seed, tol, threads_from_env());
  const Json j = ec::io::to_json(rep);
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, j);
  std::ostringstream text;
  text << "cp: " << yes_no(rep.cp.psd) << "\ncopositive: " << yes_no(rep.copositive.psd)
       << "\nblock_min: " << fmt(rep.block.value) << "\npositive_verdict: " << ec::to_string(rep.positive_verdict)
       << "\neb_verdict: " << ec::to_string(rep.eb_verdict) << '\n';
  if (rep.eb_witness) text << "eb_witness: " << rep.eb_witness->witness << '\n';
  emit(cfg, j, text.str());
  return kOk;
}

int cmd_analyze_state(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  const std::string& path = cfg.inputs.at(0);
  require_file(path);
  ec::io::LoadedState loaded = ec::io::state_from_json(ec::io::read_json_file(path), tol);
  const ec::WitnessLibrary lib = ec::build_witness_library(loaded.state.dims().m, tol, threads_from_env());
  ec::StateReport rep = ec::witness_battery(loaded.state, lib, tol, loaded.ensemble);
  rep.peres_crosscheck = rep.peres_crosscheck && ec::peres_equivalence(loaded.state, tol);
  const Json j = ec::io::to_json(rep);
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, j);
  std::ostringstream text;
  text << "ppt: " << yes_no(rep.ppt.ppt) << "\nppt_min_eigenvalue: " << fmt(rep.ppt.min_eigenvalue)
       << "\nentanglement: " << ec::to_string(rep.entanglement) << '\n';
  if (rep.entangled_by) {
    text << "witness: " << rep.entangled_by->witness << "\nwitness_eigenvalue: " << fmt(rep.entangled_by->eigenvalue)
         << '\n';
  }
  text << "peres_crosscheck: " << yes_no(rep.peres_crosscheck) << '\n';
  emit(cfg, j, text.str());
  return kOk;
}

int cmd_decompose(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  const std::string& path = cfg.inputs.at(0);
  require_file(path);
  const ec::SeparableEnsemble ens = ec::io::ensemble_from_json(ec::io::read_json_file(path), tol);
  const ec::BlockDecomposition dec = ec::decompose_separable(ens, tol);
  const Json j = ec::io::to_json(dec);
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, j);
  std::ostringstream text;
  text << "components: " << dec.components.size() << '\n';
  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    text << "component " << c << ": weight " << fmt(dec.components[c].weight) << ", terms";
    for (std::size_t i : dec.components[c].indices) text << ' ' << i;
    text << '\n';
  }
  text << "max_cross_overlap: " << fmt(dec.max_cross_overlap) << "\nreconstruction_error: "
       << fmt(dec.reconstruction_error) << '\n';
  emit(cfg, j, text.str());
  return kOk;
}

inline constexpr double kSearchFound = 1e-3;

int cmd_search(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  std::string name = cfg.inputs.at(0);
  if (name.starts_with("builtin:")) name = name.substr(8);
  ec::MatrixMap witness;
  try {
    witness = ec::builtin_map(name);
  } catch (const ec::DomainError& e) {
    throw UsageError(e.what());
  }
  const ec::SearchResult res =
      ec::search_ppt_entangled({name, witness}, cfg.budget<ec::SearchBudget>(), cfg.seed, tol, threads_from_env());
  const Json j = ec::io::to_json(res);
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, ec::io::to_json(res.state));
  std::ostringstream text;
  text << "witness: " << res.witness << "\nviolation: " << fmt(res.violation) << "\nconverged: " << yes_no(res.converged)
       << "\niterations: " << res.iterations << "\nrestart: " << res.restart << "\nseed: " << res.seed << '\n';
  emit(cfg, j, text.str());
  return res.violation >= kSearchFound && res.converged ? kOk : kNotFound;
}

int cmd_pair(const RunConfig& cfg) {
  const ec::Tolerances tol = cfg.tolerances();
  if (cfg.inputs.size() != 3) throw UsageError("pair needs <map> <a.json> <b.json>");
  const ec::MatrixMap f = load_map(cfg.inputs[0], tol);
  require_file(cfg.inputs[1]);
  require_file(cfg.inputs[2]);
  const ec::Matrix a = ec::io::matrix_from_json(ec::io::read_json_file(cfg.inputs[1]));
  const ec::Matrix b = ec::io::matrix_from_json(ec::io::read_json_file(cfg.inputs[2]));
  const ec::Complex direct = ec::pairing_value(f, a, b);
  const ec::Complex via_state = ec::trace_product(f.choi().transpose(), ec::kron(a, b));
  const Json j{{"value", Json::array({direct.real(), direct.imag()})},
               {"via_density", Json::array({via_state.real(), via_state.imag()})}};
  if (!cfg.out.empty()) ec::io::write_json_file(cfg.out, j);
  emit(cfg, j, "value: " + fmt(direct.real()) + (direct.imag() < 0 ? " - " : " + ") + fmt(std::abs(direct.imag())) +
                   "i\nvia_density: " + fmt(via_state.real()) + (via_state.imag() < 0 ? " - " : " + ") +
                   fmt(std::abs(via_state.imag())) + "i\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive maps, Choi matrices and entanglement of bipartite states"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
  app.add_option("--budget-restarts", cfg.restarts, "random restarts for block minimization or search");
  app.add_option("--budget-iters", cfg.iterations, "iterations per restart");
  app.add_option("--tol-psd", cfg.tol_psd, "PSD slack (relative to max(1, ||x||_F))");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_option("--out", cfg.out, "also write the primary artifact to this file");

  struct Command {
    const char* name;
    const char* help;
    const char* input_help;
    int (*run)(const RunConfig&);
    std::size_t inputs;
  };
  const Command commands[] = {
      {"choi", "print the Choi matrix of a map", "map file or builtin:NAME", cmd_choi, 1},
      {"classify-map", "place a map among CP / copositive / positive / entanglement breaking",
       "map file or builtin:NAME", cmd_classify, 1},
      {"analyze-state", "Peres test, witness battery and separability certificates", "state file", cmd_analyze_state, 1},
      {"decompose", "split a separable ensemble into orthogonal irreducible blocks", "ensemble file", cmd_decompose, 1},
      {"search-ppt-entangled", "search for PPT states violated by a positive map", "witness name (e.g. choi3)",
       cmd_search, 1},
      {"pair", "evaluate the dual pairing Tr(f(a) b^T)", "<map> <a.json> <b.json>", cmd_pair, 3},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("inputs", cfg.inputs, c.input_help)->required()->expected(static_cast<int>(c.inputs));
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    for (const auto& [sub, cmd] : subs) {
      if (!sub->parsed()) continue;
      if (cfg.inputs.size() != cmd->inputs) throw UsageError(std::string(cmd->name) + ": wrong number of inputs");
      for (const std::string& in : cfg.inputs) {
        if (!in.starts_with("builtin:") && std::string(cmd->name) != "search-ppt-entangled") require_file(in);
      }
      return cmd->run(cfg);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ec::DimensionError& e) {
    std::cerr << "parse error: inputs do not fit together: " << e.what() << '\n';
    return kParse;
  } catch (const ec::Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
