// nlp_select: simulate, fit, evaluate and benchmark hyper-pMOM logistic
// variable selection from the command line.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "formats.hpp"
#include "nlpsel/io.hpp"
#include "nlpsel/parallel.hpp"

namespace fs = std::filesystem;
using namespace nlpsel;
using namespace nlpsel::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitNumerical = 4;

// Decorrelates per-replicate seeds derived from one base seed.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t replicate, std::uint64_t stream = 0) {
  return splitmix64(splitmix64(base ^ (stream * 0xD1B54A32D192ED03ULL)) + replicate);
}

std::string replicate_name(int r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%03d", r + 1);
  return buf;
}

std::vector<fs::path> replicate_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw io::IoError("'" + root.string() + "' is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && e.path().filename().string().starts_with("rep_")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw io::IoError("no rep_* directories under '" + root.string() + "'");
  return dirs;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw io::IoError("input file '" + path.string() + "' does not exist");
}

ModelIndex parse_index_list(const std::string& text, int p, const std::string& what) {
  std::vector<int> idx;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1 || v > p) {
      throw std::invalid_argument(what + ": '" + item + "' is not an index in 1.." + std::to_string(p));
    }
    idx.push_back(v - 1);
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw std::invalid_argument(what + ": repeated index");
  }
  return ModelIndex(std::move(idx));
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) throw std::invalid_argument(what + ": invalid entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

Dataset load_training(const fs::path& train, const std::optional<fs::path>& response) {
  require_file(train);
  if (response) require_file(*response);
  io::RawData raw = io::read_data(train, response);
  return Dataset::standardize(std::move(raw.x), std::move(raw.y));
}

// ---------------------------------------------------------------- options

struct PriorOptions {
  std::optional<double> lambda2;
  int r = 1;
  double lambda1 = 1.0;
  std::optional<int> m_n;
  bool intercept = false;

  HyperPmomConfig resolve(int n, int p) const {
    HyperPmomConfig cfg = HyperPmomConfig::defaults(n, p);
    if (lambda2) cfg.lambda2 = *lambda2;
    cfg.r = r;
    cfg.lambda1 = lambda1;
    if (m_n) cfg.m_n = *m_n;
    cfg.intercept = intercept;
    cfg.validate(p);
    return cfg;
  }

  void add_to(CLI::App& app) {
    app.add_option("--lambda2", lambda2, "Inverse-Gamma scale (default 100 n^(-1/3) p^(4.002/3))");
    app.add_option("--r", r, "pMOM order")->capture_default_str();
    app.add_option("--lambda1", lambda1, "Inverse-Gamma shape")->capture_default_str();
    app.add_option("--m-n", m_n, "Model size cap (default min(p, 4 ceil(sqrt(n / log p))))");
    app.add_flag("--intercept", intercept, "Fit an unpenalized intercept");
  }
};

struct SearchOptions {
  std::string algorithm = "rsss";
  int iterations = 100;
  int k1 = 10;
  int k2 = 10;
  std::uint64_t seed = 1;
  std::string initial = "random-3";
  int max_iter = 500;
  double grad_tol = 1e-6;

  SearchConfig resolve(int p, std::uint64_t run_seed) const {
    SearchConfig sc;
    sc.algorithm = parse_algorithm(algorithm);
    sc.n_iterations = iterations;
    sc.k1 = k1;
    sc.k2 = k2;
    sc.seed = run_seed;
    if (initial == "none") {
      sc.initial_model = ModelIndex{};
    } else if (initial != "random-3") {
      sc.initial_model = parse_index_list(initial, p, "--initial");
    }
    sc.mode.max_iterations = max_iter;
    sc.mode.grad_tol = grad_tol;
    sc.validate();
    return sc;
  }

  void add_to(CLI::App& app, bool with_algorithm = true) {
    if (with_algorithm) {
      app.add_option("--algorithm", algorithm, "sss or rsss")->capture_default_str();
    }
    app.add_option("--iterations", iterations, "Search iterations N")->capture_default_str();
    app.add_option("--k1", k1, "RSSS correlation-screened additions")->capture_default_str();
    app.add_option("--k2", k2, "RSSS random additions")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    if (with_algorithm) {
      app.add_option("--initial", initial, "Initial model: random-3, none (empty model) or 1-based indices like 1,2,3")
          ->capture_default_str();
    }
    app.add_option("--max-iter", max_iter, "Mode optimizer iteration cap")->capture_default_str();
    app.add_option("--grad-tol", grad_tol, "Mode optimizer relative gradient tolerance")->capture_default_str();
  }
};

struct DesignOptions {
  int n = 100;
  int p = 100;
  int n_test = 50;
  std::string signal = "moderate";
  std::string covariance = "isotropic";
  double rho = 0.3;
  std::string support = "1,2,3";

  SimDesign resolve(int p_value, std::uint64_t seed) const {
    SimDesign d;
    d.n = n;
    d.p = p_value;
    d.n_test = n_test;
    d.signal = parse_signal(signal);
    d.covariance = parse_covariance(covariance);
    d.rho = rho;
    d.true_support = support.empty() || support == "none" ? ModelIndex{} : parse_index_list(support, p_value, "--support");
    d.seed = seed;
    d.validate();
    return d;
  }

  void add_to(CLI::App& app, bool with_p = true) {
    app.add_option("--n", n, "Training rows")->capture_default_str();
    if (with_p) app.add_option("--p", p, "Covariates")->capture_default_str();
    app.add_option("--n-test", n_test, "Test rows")->capture_default_str();
    app.add_option("--signal", signal, "weak (1), moderate (2) or a positive number")->capture_default_str();
    app.add_option("--covariance", covariance, "isotropic or ar")->capture_default_str();
    app.add_option("--rho", rho, "AR correlation")->capture_default_str();
    app.add_option("--support", support, "1-based true support, or 'none'")->capture_default_str();
  }
};

// --------------------------------------------------------------- commands

struct SimulateCmd {
  DesignOptions design;
  int replicates = 1;
  std::uint64_t seed = 1;
  fs::path out;

  int run(int threads) const {
    std::vector<SimDesign> designs;
    for (int r = 0; r < replicates; ++r) designs.push_back(design.resolve(design.p, replicate_seed(seed, r)));
    fs::create_directories(out);
    parallel_for(designs.size(), threads, [&](std::size_t r) {
      const SimulatedData sim = generate(designs[r]);
      const fs::path dir = out / replicate_name(static_cast<int>(r));
      fs::create_directories(dir);
      // Raw covariates: fit standardizes the training file and evaluate
      // applies the training statistics to the test file.
      io::write_data(dir / "train.csv", sim.raw_train_x, sim.train.y());
      io::write_data(dir / "test.csv", sim.raw_test_x, sim.test.y());
      write_json(dir / "truth.json", truth_json(designs[r], sim.truth));
    });
    std::cout << "wrote " << replicates << " replicate(s) under " << out.string() << "\n";
    return kExitOk;
  }
};

struct FitCmd {
  PriorOptions prior;
  SearchOptions search;
  std::optional<fs::path> train;
  std::optional<fs::path> response;
  std::optional<fs::path> out;
  std::optional<fs::path> sim_dir;
  std::string out_name = "selection.json";

  struct Job {
    fs::path train;
    std::optional<fs::path> response;
    fs::path out;
  };

  int run(int threads) const {
    std::vector<Job> jobs;
    if (sim_dir) {
      for (const auto& dir : replicate_dirs(*sim_dir)) jobs.push_back({dir / "train.csv", std::nullopt, dir / out_name});
    } else {
      if (!train || !out) throw std::invalid_argument("fit: give --train and --out, or --sim-dir");
      jobs.push_back({*train, response, *out});
    }
    // Parse every input before any computation.
    std::vector<Dataset> data;
    for (const auto& j : jobs) data.push_back(load_training(j.train, j.response));

    const bool many = jobs.size() > 1;
    std::vector<Json> results(jobs.size());
    std::vector<char> converged(jobs.size(), 1);
    parallel_for(jobs.size(), many ? threads : 1, [&](std::size_t i) {
      FitSettings s;
      s.n = data[i].n();
      s.p = data[i].p();
      s.prior = prior.resolve(s.n, s.p);
      s.search = search.resolve(s.p, search.seed);
      s.search.threads = many ? 1 : threads;
      const SearchTrace trace = run_search(data[i], s.prior, s.search);
      results[i] = selection_json(s, trace);
      converged[i] = trace.best.converged;
    });
    int code = kExitOk;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      write_json(jobs[i].out, results[i]);
      std::cout << jobs[i].out.string() << ": selected " << results[i]["selected_indices"].dump()
                << (converged[i] ? "" : " (mode optimization did not converge)") << "\n";
      if (!converged[i]) code = kExitNotConverged;
    }
    return code;
  }
};

struct EvaluateCmd {
  std::optional<fs::path> sim_dir;
  std::string selection_name = "selection.json";
  std::optional<std::string> coefficients_name;
  std::optional<fs::path> selection;
  std::optional<fs::path> coefficients;
  std::optional<fs::path> truth;
  std::optional<fs::path> train;
  std::optional<fs::path> test;
  double threshold = 0.0;
  std::optional<fs::path> out;
  std::optional<fs::path> csv;

  struct Job {
    std::string name;
    fs::path fitted;  // selection JSON or coefficient CSV
    bool is_coefficients = false;
    fs::path truth, train, test;
  };

  int run(int threads) const {
    if (!out && !csv) throw std::invalid_argument("evaluate: give --out and/or --csv");
    std::vector<Job> jobs;
    if (sim_dir) {
      for (const auto& dir : replicate_dirs(*sim_dir)) {
        const bool coef = coefficients_name.has_value();
        jobs.push_back({dir.filename().string(), dir / (coef ? *coefficients_name : selection_name), coef,
                        dir / "truth.json", dir / "train.csv", dir / "test.csv"});
      }
    } else {
      if ((selection.has_value() == coefficients.has_value()) || !truth || !train || !test) {
        throw std::invalid_argument(
            "evaluate: give exactly one of --selection/--coefficients plus --truth, --train and --test, or --sim-dir");
      }
      jobs.push_back({"1", coefficients ? *coefficients : *selection, coefficients.has_value(), *truth, *train, *test});
    }
    for (const auto& j : jobs) {
      for (const auto& path : {j.fitted, j.truth, j.train, j.test}) require_file(path);
    }

    std::vector<ReplicateReport> reports(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) { reports[i] = evaluate_one(jobs[i]); });
    const ReportAverage mean = average([&] {
      std::vector<SelectionReport> r;
      for (const auto& rr : reports) r.push_back(rr.report);
      return r;
    }());
    if (out) write_json(*out, evaluation_json(reports, mean));
    if (csv) io::write_text(*csv, evaluation_csv(reports, mean));
    std::cout << "evaluated " << reports.size() << " replicate(s)\n";
    return kExitOk;
  }

  ReplicateReport evaluate_one(const Job& job) const {
    const io::RawData train_raw = io::read_data(job.train);
    const io::RawData test_raw = io::read_data(job.test);
    const TruthFile t = read_truth(job.truth);
    const int p = static_cast<int>(train_raw.x.cols());
    auto mismatch = [&](const fs::path& file, long long other) {
      if (other != p) {
        throw std::invalid_argument("evaluate: " + file.string() + " has p=" + std::to_string(other) + " but " +
                                    job.train.string() + " has p=" + std::to_string(p));
      }
    };
    mismatch(job.test, test_raw.x.cols());
    mismatch(job.truth, t.p);

    const Dataset train_data = Dataset::standardize(train_raw.x, train_raw.y);
    const Dataset test_data = Dataset::apply_standardization(test_raw.x, test_raw.y, train_data.column_means(),
                                                             train_data.column_sds());
    ReplicateReport rr;
    rr.name = job.name;
    if (job.is_coefficients) {
      const io::Coefficients c = io::read_coefficients(job.fitted);
      mismatch(job.fitted, c.beta.size());
      rr.report = evaluate_coefficients(c.beta, c.intercept, t.support, test_data, threshold);
    } else {
      const SelectionFile s = read_selection(job.fitted);
      mismatch(job.fitted, s.p);
      ScoredModel fitted;
      fitted.k = s.selected;
      fitted.beta_hat = s.beta_hat;
      fitted.intercept = s.intercept;
      rr.report = selection_report(s.selected, t.support, p);
      rr.report.mspe = nlpsel::mspe(test_data.y(), predict(test_data, fitted));
    }
    return rr;
  }
};

struct BenchmarkCmd {
  DesignOptions design;
  PriorOptions prior;
  SearchOptions search;
  std::string p_grid = "100,300,500";
  int replicates = 10;
  fs::path out;

  int run(int threads) const {
    const std::vector<int> grid = parse_int_list(p_grid, "--p-grid");
    struct Cell {
      std::int64_t before_best[2] = {0, 0};
      std::int64_t scored[2] = {0, 0};
      bool same = false;
    };
    std::vector<Cell> cells(grid.size() * static_cast<std::size_t>(replicates));
    // Validate every configuration before running anything.
    for (int p : grid) {
      (void)design.resolve(p, 0);
      (void)search.resolve(p, 0);
      (void)prior.resolve(design.n, p);
    }
    parallel_for(cells.size(), threads, [&](std::size_t idx) {
      const std::size_t g = idx / static_cast<std::size_t>(replicates);
      const auto r = static_cast<std::uint64_t>(idx % static_cast<std::size_t>(replicates));
      const int p = grid[g];
      const SimulatedData sim = generate(design.resolve(p, replicate_seed(search.seed, r, static_cast<std::uint64_t>(p))));
      const HyperPmomConfig cfg = prior.resolve(sim.train.n(), p);
      SearchConfig sc = search.resolve(p, replicate_seed(search.seed, r, 1000003));
      ModelIndex best[2];
      for (int a = 0; a < 2; ++a) {
        sc.algorithm = a == 0 ? Algorithm::SSS : Algorithm::RSSS;
        const SearchTrace t = run_search(sim.train, cfg, sc);
        cells[idx].before_best[a] = t.models_scored_before_best;
        cells[idx].scored[a] = t.cache_misses;
        best[a] = t.best.k;
      }
      cells[idx].same = best[0] == best[1];
    });

    std::string csv = "p,algorithm,replicates,mean_models_scored_before_best,mean_models_scored,same_best_as_sss\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (int a = 0; a < 2; ++a) {
        double before = 0.0, scored = 0.0, same = 0.0;
        for (int r = 0; r < replicates; ++r) {
          const Cell& c = cells[g * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(r)];
          before += static_cast<double>(c.before_best[a]);
          scored += static_cast<double>(c.scored[a]);
          same += a == 0 || c.same ? 1.0 : 0.0;
        }
        csv += std::to_string(grid[g]) + ',' + (a == 0 ? "sss" : "rsss") + ',' + std::to_string(replicates) + ',' +
               io::format_double(before / replicates) + ',' + io::format_double(scored / replicates) + ',' +
               io::format_double(same / replicates) + '\n';
      }
    }
    io::write_text(out, csv);
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
  }
};

// TOML for the top-level options plus the chosen subcommand, readable by --config.
std::string resolved_config(const CLI::App& app) {
  auto value_of = [](const CLI::Option* opt) -> std::optional<std::string> {
    std::string v;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) v += (v.empty() ? "" : ",") + r;
    } else {
      v = opt->get_default_str();
    }
    if (v.empty()) return std::nullopt;
    return v;
  };
  auto section = [&](const CLI::App& a) {
    std::string out;
    for (const CLI::Option* opt : a.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name == "print-config" || opt->get_lnames().empty()) continue;
      if (auto v = value_of(opt)) out += name + "=\"" + *v + "\"\n";
    }
    return out;
  };
  std::string out = section(app);
  for (const CLI::App* sub : app.get_subcommands()) out += "\n[" + sub->get_name() + "]\n" + section(*sub);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection for logistic regression with hyper-pMOM nonlocal priors"};
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->envname("NLP_SELECT_THREADS")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  SimulateCmd simulate;
  auto* sim_app = app.add_subcommand("simulate", "Generate replicate train/test datasets");
  simulate.design.add_to(*sim_app);
  sim_app->add_option("--replicates", simulate.replicates, "Number of replicates")->capture_default_str()->check(CLI::PositiveNumber);
  sim_app->add_option("--seed", simulate.seed, "Random seed")->capture_default_str();
  sim_app->add_option("--out", simulate.out, "Output directory")->required();

  FitCmd fit;
  auto* fit_app = app.add_subcommand("fit", "Search for the posterior-mode model");
  fit.prior.add_to(*fit_app);
  fit.search.add_to(*fit_app);
  fit_app->add_option("--train", fit.train, "CSV with columns y,x1..xp (or x1..xp with --response)");
  fit_app->add_option("--response", fit.response, "CSV with a single column y");
  fit_app->add_option("--out", fit.out, "Selection JSON to write");
  fit_app->add_option("--sim-dir", fit.sim_dir, "Fit every rep_*/train.csv under this directory");
  fit_app->add_option("--out-name", fit.out_name, "Selection file name inside each replicate directory")
      ->capture_default_str();

  EvaluateCmd evaluate;
  auto* eval_app = app.add_subcommand("evaluate", "Selection and prediction metrics against the truth");
  eval_app->add_option("--sim-dir", evaluate.sim_dir, "Evaluate every rep_* directory");
  eval_app->add_option("--selection-name", evaluate.selection_name, "Selection JSON name in each replicate")
      ->capture_default_str();
  eval_app->add_option("--coefficients-name", evaluate.coefficients_name,
                       "Evaluate a dense coefficient CSV (column beta) in each replicate instead");
  eval_app->add_option("--selection", evaluate.selection, "Selection JSON written by fit");
  eval_app->add_option("--coefficients", evaluate.coefficients, "Dense coefficient CSV (columns [name,]beta)");
  eval_app->add_option("--truth", evaluate.truth, "truth.json");
  eval_app->add_option("--train", evaluate.train, "Training CSV (source of the standardization)");
  eval_app->add_option("--test", evaluate.test, "Test CSV");
  eval_app->add_option("--threshold", evaluate.threshold, "|coefficient| above which a covariate counts as selected")
      ->capture_default_str();
  eval_app->add_option("--out", evaluate.out, "Metrics JSON");
  eval_app->add_option("--csv", evaluate.csv, "Metrics CSV");

  BenchmarkCmd bench;
  bench.design.signal = "weak";
  bench.search.iterations = 100;
  auto* bench_app = app.add_subcommand("benchmark", "Models scored before reaching the best model, SSS vs RSSS");
  bench.design.add_to(*bench_app, false);
  bench.prior.add_to(*bench_app);
  bench.search.add_to(*bench_app, false);
  bench_app->add_option("--p-grid", bench.p_grid, "Comma-separated p values")->capture_default_str();
  bench_app->add_option("--replicates", bench.replicates, "Replicates per p")->capture_default_str()->check(CLI::PositiveNumber);
  bench_app->add_option("--out", bench.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (print_config) {
    std::cout << resolved_config(app);
    return kExitOk;
  }
  if (threads == 0) threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));

  try {
    if (*sim_app) return simulate.run(threads);
    if (*fit_app) return fit.run(threads);
    if (*eval_app) return evaluate.run(threads);
    if (*bench_app) return bench.run(threads);
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInvalid;
}
