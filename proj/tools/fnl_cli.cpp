// Reproducible experiment runner: one subcommand per experiment, seeded,
// emitting CSV/JSON rows for external plotting.
#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "fnl/circuits.hpp"
#include "fnl/covariance.hpp"
#include "fnl/ensembles.hpp"
#include "fnl/lattice.hpp"
#include "fnl/optimizer.hpp"
#include "fnl/oracle.hpp"
#include "fnl/parallel.hpp"
#include "fnl/quench.hpp"
#include "fnl/records.hpp"

namespace {

using fnl::format_double;
using fnl::format_int;

// Accepts comma-separated values where each entry may be a start:stop:step
// range (inclusive stop, within half a step).
std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t comma = text.find(',', begin);
    std::string item = text.substr(begin, comma == std::string::npos ? comma : comma - begin);
    if (!item.empty()) {
      std::size_t c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(std::stod(item));
      } else {
        std::size_t c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw CLI::ValidationError("range must be start:stop:step");
        double start = std::stod(item.substr(0, c1));
        double stop = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
        double step = std::stod(item.substr(c2 + 1));
        if (step <= 0.0) throw CLI::ValidationError("range step must be positive");
        for (double v = start; v <= stop + 0.5 * step; v += step) out.push_back(v);
      }
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(std::llround(v)));
  return out;
}

double parse_mu0(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  return std::stod(text);
}

struct CommonOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "-";
  std::string format = "csv";
  int alpha = 2;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG root seed");
  cmd->add_option("--threads", c.threads, "worker threads (0 = FNL_THREADS or hardware)");
  cmd->add_option("--out", c.out, "output path ('-' = stdout)");
  cmd->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--alpha", c.alpha, "stabilizer-entropy order (integer >= 2)");
}

void emit(const fnl::RecordTable& table, const CommonOpts& c) {
  fnl::write_atomic(c.out, fnl::serialize(table, c.format == "csv"
                                                     ? fnl::RecordFormat::kCsv
                                                     : fnl::RecordFormat::kJson));
}

int run_page_curve(const CommonOpts& c, const std::vector<int>& ns, std::string ells_text,
                   int samples) {
  fnl::RecordTable table;
  table.columns = {"N", "ell", "r", "fnl_exact_kernel", "fnl_montecarlo", "stderr",
                   "fnl_asymptotic", "seed", "version"};
  const fnl::WeightOrder alpha(c.alpha);
  for (int n : ns) {
    std::vector<int> ells;
    if (ells_text.empty()) {
      for (int ell = 1; ell <= n / 2; ++ell) ells.push_back(ell);
    } else {
      ells = parse_int_list(ells_text);
    }
    fnl::MonteCarloOptions opts;
    opts.samples = samples;
    opts.seed = c.seed;
    opts.threads = c.threads;
    auto mc = fnl::monte_carlo_page(n, ells, alpha, opts);
    for (std::size_t i = 0; i < ells.size(); ++i) {
      const int ell = ells[i];
      const double r = static_cast<double>(ell) / n;
      const double kernel =
          fnl::page_curve_finite(fnl::JacobiKernelParams(n, ell), alpha) / n;
      table.add_row({format_int(n), format_int(ell), format_double(r), format_double(kernel),
                     format_double(mc[i].density), format_double(mc[i].stderr_density),
                     format_double(fnl::page_curve_asymptotic(r, alpha)),
                     format_int(static_cast<long long>(c.seed)), fnl::kToolVersion});
    }
  }
  emit(table, c);
  return 0;
}

int run_syk2(const CommonOpts& c, const std::vector<int>& ns, std::string ells_text,
             int disorder, int eigenstates) {
  fnl::RecordTable table;
  table.columns = {"N", "r", "fnl_density_mean", "stderr", "fnl_asymptotic", "seed", "version"};
  const fnl::WeightOrder alpha(c.alpha);
  for (int n : ns) {
    std::vector<int> ells;
    if (ells_text.empty()) {
      for (int ell = std::max(1, n / 10); ell <= n / 2; ell += std::max(1, n / 10))
        ells.push_back(ell);
    } else {
      ells = parse_int_list(ells_text);
    }
    fnl::Syk2Config cfg;
    cfg.total_modes = n;
    cfg.disorder_samples = disorder;
    cfg.eigenstates_per_sample = eigenstates;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    auto points = fnl::syk2_page(cfg, ells, alpha);
    for (const auto& p : points) {
      table.add_row({format_int(n), format_double(p.r), format_double(p.density_mean),
                     format_double(p.density_stderr),
                     format_double(fnl::page_curve_asymptotic(std::min(p.r, 0.5), alpha)),
                     format_int(static_cast<long long>(c.seed)), fnl::kToolVersion});
    }
  }
  emit(table, c);
  return 0;
}

int run_xy_ground(const CommonOpts& c, const std::vector<double>& mus,
                  const std::vector<double>& etas, const std::vector<int>& ells) {
  fnl::RecordTable table;
  table.columns = {"mu", "eta", "ell", "fnl", "fnl_peschel", "beta_fit", "seed", "version"};
  const fnl::WeightOrder alpha(c.alpha);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double mu : mus) {
    for (double eta : etas) {
      const fnl::XYParams p{mu, eta};
      std::vector<double> fnls(ells.size());
      fnl::parallel_for(ells.size(), c.threads, [&](std::size_t i) {
        fnls[i] = fnl::fnl_magic(fnl::mode_spectrum(fnl::ground_state_block_toeplitz(ells[i], p)),
                                 alpha);
      });
      double beta_fit = nan;
      if (ells.size() >= 3) {
        double xs = 0, ys = 0, xx = 0, xy = 0;
        for (std::size_t i = 0; i < ells.size(); ++i) {
          const double x = std::log(ells[i]);
          xs += x;
          ys += fnls[i];
          xx += x * x;
          xy += x * fnls[i];
        }
        const double n = static_cast<double>(ells.size());
        beta_fit = (n * xy - xs * ys) / (n * xx - xs * xs);
      }
      for (std::size_t i = 0; i < ells.size(); ++i) {
        double peschel = nan;
        try {
          peschel = fnl::fnl_semi_infinite(p, alpha).block;
        } catch (const std::exception&) {
        }
        table.add_row({format_double(mu), format_double(eta), format_int(ells[i]),
                       format_double(fnls[i]), format_double(peschel), format_double(beta_fit),
                       format_int(static_cast<long long>(c.seed)), fnl::kToolVersion});
      }
    }
  }
  emit(table, c);
  return 0;
}

int run_xy_phase(const CommonOpts& c, const std::vector<double>& mus,
                 const std::vector<double>& etas, int ell) {
  fnl::RecordTable table;
  table.columns = {"mu", "eta", "ell", "fnl_density", "seed", "version"};
  fnl::PhaseScanOptions opts;
  opts.threads = c.threads;
  auto cells = fnl::phase_diagram_scan(mus, etas, ell, fnl::WeightOrder(c.alpha), opts);
  for (const auto& cell : cells) {
    table.add_row({format_double(cell.mu), format_double(cell.eta), format_int(cell.ell),
                   format_double(cell.fnl_density), format_int(static_cast<long long>(c.seed)),
                   fnl::kToolVersion});
  }
  emit(table, c);
  return 0;
}

int run_quench(const CommonOpts& c, const std::string& mu0_text, double mu, int ell,
               const std::vector<double>& times) {
  fnl::RecordTable table;
  table.columns = {"mu0", "mu",     "ell",     "t",          "fnl_exact",
                   "fnl_qp", "fnl_gge", "entropy_qp", "seed", "version"};
  const fnl::WeightOrder alpha(c.alpha);
  const fnl::QuenchParams qp{parse_mu0(mu0_text), mu};
  const double gge = fnl::stationary_fnl(ell, qp, alpha);
  std::vector<std::array<double, 3>> rows(times.size());
  fnl::parallel_for(times.size(), c.threads, [&](std::size_t i) {
    rows[i] = {fnl::fnl_evolved(ell, times[i], qp, alpha),
               fnl::quasiparticle_fnl(ell, times[i], qp, alpha),
               fnl::quasiparticle_entropy(ell, times[i], qp)};
  });
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.add_row({mu0_text, format_double(mu), format_int(ell), format_double(times[i]),
                   format_double(rows[i][0]), format_double(rows[i][1]), format_double(gge),
                   format_double(rows[i][2]), format_int(static_cast<long long>(c.seed)),
                   fnl::kToolVersion});
  }
  emit(table, c);
  return 0;
}

int run_circuit(const CommonOpts& c, const std::vector<int>& ns, int layers, int realizations,
                const std::string& measure_text) {
  fnl::RecordTable table;
  table.columns = {"N",          "t",    "sqrt_t_over_N", "fnl_mean", "fnl_stderr",
                   "realizations", "seed", "version"};
  for (int n : ns) {
    fnl::CircuitConfig cfg;
    cfg.sites = n;
    cfg.layers = layers > 0 ? layers : 2 * n * n;
    cfg.realizations = realizations;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    if (!measure_text.empty()) {
      cfg.measure_layers = parse_int_list(measure_text);
    } else if (cfg.layers > 512) {
      // Log-spaced growth samples plus a dense final window for the plateau.
      for (int t = 1; t <= cfg.layers; t = std::max(t + 1, static_cast<int>(t * 1.25)))
        cfg.measure_layers.push_back(t);
      const int window = cfg.layers / 10;
      for (int t = cfg.layers - window; t <= cfg.layers; t += std::max(1, window / 16))
        cfg.measure_layers.push_back(t);
    }
    auto points = fnl::circuit_fnl_trajectory(cfg, fnl::WeightOrder(c.alpha));
    for (const auto& p : points) {
      table.add_row({format_int(n), format_int(p.layer), format_double(p.sqrt_t_over_n),
                     format_double(p.fnl_mean), format_double(p.fnl_stderr),
                     format_int(p.realizations), format_int(static_cast<long long>(c.seed)),
                     fnl::kToolVersion});
    }
  }
  emit(table, c);
  return 0;
}

int run_verify(const CommonOpts& c, int n, int ell, const std::string& kind, int states,
               const std::string& mus_text, int restarts) {
  fnl::RecordTable table;
  table.columns = {"state_id",     "fnl_formula",  "min_gaussian", "min_generic",
                   "gap_gaussian", "gap_generic",  "seed",         "version"};
  const fnl::WeightOrder alpha(c.alpha);

  struct Item {
    std::string id;
    fnl::DenseState psi;
  };
  std::vector<Item> items;
  if (kind == "random") {
    for (int s = 0; s < states; ++s) {
      fnl::Rng rng = fnl::derive_stream(c.seed, s);
      Eigen::MatrixXd o = fnl::sample_haar_orthogonal(2 * n, rng);
      items.push_back({"haar_" + std::to_string(s), fnl::gaussian_state_from_orthogonal(o)});
    }
  } else {
    for (double mu : parse_double_list(mus_text)) {
      char id[32];
      std::snprintf(id, sizeof(id), "ising_mu=%g", mu);
      items.push_back({id, fnl::ising_ground_state_dense(n, mu)});
    }
  }

  for (const auto& item : items) {
    const fnl::CovarianceMatrix gamma = fnl::covariance_from_state(item.psi);
    const double formula =
        fnl::fnl_magic(gamma, fnl::BipartitionSpec::prefix(ell, n), alpha);
    fnl::OptimizerConfig cfg;
    cfg.alpha = c.alpha;
    cfg.restarts = restarts;
    cfg.convergence = 1e-13;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    cfg.unitary_class = fnl::UnitaryClass::kGaussian;
    const auto gauss = fnl::variational_min(item.psi, ell, cfg);
    cfg.unitary_class = fnl::UnitaryClass::kGeneric;
    const auto generic = fnl::variational_min(item.psi, ell, cfg);
    table.add_row({item.id, format_double(formula), format_double(gauss.value),
                   format_double(generic.value), format_double(gauss.value - formula),
                   format_double(generic.value - formula),
                   format_int(static_cast<long long>(c.seed)), fnl::kToolVersion});
  }
  emit(table, c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermionic non-local magic of Gaussian states"};
  // key=value lines under a [subcommand] section; flags override file values
  app.set_config("--config", "", "key=value config file (flags override)");
  app.fallthrough();
  app.require_subcommand(1);

  CommonOpts c;

  // page-curve
  auto* page = app.add_subcommand("page-curve", "Haar-random Page curve: kernel, MC, asymptote");
  std::string page_ns = "12", page_ells;
  int page_samples = 200;
  add_common(page, c);
  page->add_option("--n", page_ns, "total modes (list)");
  page->add_option("--ell", page_ells, "subsystem sizes (list; default 1..N/2)");
  page->add_option("--samples", page_samples, "Monte Carlo samples");

  // syk2
  auto* syk = app.add_subcommand("syk2", "SYK2 mid-spectrum eigenstate FNL density");
  std::string syk_ns = "40", syk_ells;
  int syk_disorder = 20, syk_eigen = 10;
  add_common(syk, c);
  syk->add_option("--n", syk_ns, "total modes (list)");
  syk->add_option("--ell", syk_ells, "subsystem sizes (list)");
  syk->add_option("--samples", syk_disorder, "disorder realizations");
  syk->add_option("--eigenstates", syk_eigen, "eigenstates per disorder sample");

  // xy-ground
  auto* xy = app.add_subcommand("xy-ground", "XY ground-state FNL vs Peschel series");
  std::string xy_mus = "0.5:4.0:0.25", xy_etas = "1", xy_ells = "64";
  add_common(xy, c);
  xy->add_option("--mu", xy_mus, "transverse fields (list)");
  xy->add_option("--eta", xy_etas, "anisotropies (list)");
  xy->add_option("--ell", xy_ells, "block sizes (list)");

  // xy-phase
  auto* phase = app.add_subcommand("xy-phase", "FNL density heatmap over the XY phase diagram");
  std::string ph_mus = "0:2:0.1", ph_etas = "-1:1:0.1";
  int ph_ell = 64;
  add_common(phase, c);
  phase->add_option("--mu", ph_mus, "transverse field grid");
  phase->add_option("--eta", ph_etas, "anisotropy grid");
  phase->add_option("--ell", ph_ell, "block size for near-critical cells");

  // quench
  auto* quench = app.add_subcommand("quench", "Ising quench: exact, quasiparticle, GGE");
  std::string q_mu0 = "inf", q_times = "0:100:5";
  double q_mu = 1.0;
  int q_ell = 100;
  add_common(quench, c);
  quench->add_option("--mu0", q_mu0, "pre-quench field (number or 'inf')");
  quench->add_option("--mu", q_mu, "post-quench field");
  quench->add_option("--ell", q_ell, "block size");
  quench->add_option("--times", q_times, "times (list)");

  // circuit
  auto* circ = app.add_subcommand("circuit", "Brickwork matchgate circuit FNL growth");
  std::string circ_ns = "20", circ_measure;
  int circ_layers = 0, circ_real = 20;
  add_common(circ, c);
  circ->add_option("--n", circ_ns, "sites (list)");
  circ->add_option("--layers", circ_layers, "layers (0 = 2 N^2)");
  circ->add_option("--samples", circ_real, "circuit realizations");
  circ->add_option("--measure", circ_measure, "measurement layers (list; default auto)");

  // verify
  auto* verify = app.add_subcommand("verify", "Closed form vs variational minimization");
  std::string v_kind = "random", v_mus = "0.2,1.0,3.0";
  int v_n = 6, v_ell = 3, v_states = 10, v_restarts = 10;
  add_common(verify, c);
  verify->add_option("--n", v_n, "qubits");
  verify->add_option("--ell", v_ell, "subsystem size");
  verify->add_option("--kind", v_kind, "random or ising")
      ->check(CLI::IsMember({"random", "ising"}));
  verify->add_option("--states", v_states, "number of random states");
  verify->add_option("--mu", v_mus, "Ising fields (list, kind=ising)");
  verify->add_option("--restarts", v_restarts, "optimizer restarts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*page) return run_page_curve(c, parse_int_list(page_ns), page_ells, page_samples);
    if (*syk) return run_syk2(c, parse_int_list(syk_ns), syk_ells, syk_disorder, syk_eigen);
    if (*xy)
      return run_xy_ground(c, parse_double_list(xy_mus), parse_double_list(xy_etas),
                           parse_int_list(xy_ells));
    if (*phase)
      return run_xy_phase(c, parse_double_list(ph_mus), parse_double_list(ph_etas), ph_ell);
    if (*quench) return run_quench(c, q_mu0, q_mu, q_ell, parse_double_list(q_times));
    if (*circ) return run_circuit(c, parse_int_list(circ_ns), circ_layers, circ_real,
                                  circ_measure);
    if (*verify) return run_verify(c, v_n, v_ell, v_kind, v_states, v_mus, v_restarts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
