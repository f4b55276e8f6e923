#include "formats.hpp"

#include <algorithm>

#include "nlpsel/io.hpp"

namespace nlpsel::cli {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : "NA"; }

const Json& field(const Json& j, const char* key, const std::string& source) {
  if (!j.is_object() || !j.contains(key)) {
    throw io::ParseError(source + ": missing field '" + key + "'");
  }
  return j.at(key);
}

int positive_int(const Json& j, const char* key, const std::string& source) {
  const Json& v = field(j, key, source);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw io::ParseError(source + ": field '" + key + "' must be a positive integer");
  }
  return v.get<int>();
}

}  // namespace

Json to_json(const ModelIndex& k) {
  Json arr = Json::array();
  for (int j : k) arr.push_back(j + 1);
  return arr;
}

ModelIndex model_from_json(const Json& j, int p, const std::string& what) {
  if (!j.is_array()) throw io::ParseError(what + ": expected an array of 1-based indices");
  std::vector<int> idx;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > p) {
      throw io::ParseError(what + ": index " + v.dump() + " is outside 1.." + std::to_string(p));
    }
    idx.push_back(v.get<int>() - 1);
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw io::ParseError(what + ": repeated index");
  }
  return ModelIndex(std::move(idx));
}

Json truth_json(const SimDesign& design, const Truth& truth) {
  Json j;
  j["n"] = design.n;
  j["p"] = design.p;
  j["n_test"] = design.n_test;
  j["signal"] = design.signal;
  j["covariance"] = to_string(design.covariance);
  j["rho"] = design.covariance == Covariance::AR ? Json(design.rho) : Json(nullptr);
  j["seed"] = design.seed;
  j["support"] = to_json(truth.support);
  j["beta"] = std::vector<double>(truth.beta.begin(), truth.beta.end());
  return j;
}

TruthFile read_truth(const std::filesystem::path& path) {
  const Json j = read_json(path);
  TruthFile t;
  t.p = positive_int(j, "p", path.string());
  t.support = model_from_json(field(j, "support", path.string()), t.p, path.string() + ": support");
  return t;
}

Json selection_json(const FitSettings& s, const SearchTrace& trace) {
  const ScoredModel& best = trace.best;
  Json j;
  j["selected_indices"] = to_json(best.k);
  j["beta_hat"] = std::vector<double>(best.beta_hat.begin(), best.beta_hat.end());
  j["intercept"] = s.prior.intercept ? Json(best.intercept) : Json(nullptr);
  j["log_marginal"] = best.log_laplace_marginal;
  j["log_posterior"] = trace.best_log_posterior;
  j["converged"] = best.converged;
  j["n"] = s.n;
  j["p"] = s.p;

  Json& cfg = j["config"];
  cfg["likelihood"] = "logistic";
  cfg["r"] = s.prior.r;
  cfg["lambda1"] = s.prior.lambda1;
  cfg["lambda2"] = s.prior.lambda2;
  cfg["m_n"] = s.prior.m_n;
  cfg["intercept"] = s.prior.intercept;
  cfg["algorithm"] = to_string(s.search.algorithm);
  cfg["iterations"] = s.search.n_iterations;
  cfg["k1"] = s.search.k1;
  cfg["k2"] = s.search.k2;
  cfg["seed"] = s.search.seed;
  cfg["initial_model"] = s.search.initial_model ? to_json(*s.search.initial_model) : Json("random-3");
  cfg["max_mode_iterations"] = s.search.mode.max_iterations;
  cfg["grad_tol"] = s.search.mode.grad_tol;

  Json& tr = j["trace"];
  tr["models_scored"] = trace.cache_misses;
  tr["models_scored_before_best"] = trace.models_scored_before_best;
  tr["cache_hits"] = trace.cache_hits;
  tr["cache_misses"] = trace.cache_misses;
  tr["failed_scores"] = trace.failed_scores;
  Json visited = Json::array();
  for (const auto& v : trace.visited) {
    visited.push_back({{"iteration", v.iteration}, {"model", to_json(v.k)}, {"log_posterior", v.log_posterior}});
  }
  tr["visited"] = std::move(visited);
  Json history = Json::array();
  for (const auto& m : trace.mode_history) {
    history.push_back({{"iteration", m.iteration},
                       {"models_scored", m.models_scored},
                       {"model", to_json(m.k)},
                       {"log_posterior", m.log_posterior}});
  }
  tr["mode_history"] = std::move(history);

  Json& diag = j["diagnostics"];
  diag["mode_converged"] = best.converged;
  diag["mode_iterations"] = best.iterations;
  diag["log_f_at_mode"] = best.log_f_at_mode;
  return j;
}

SelectionFile read_selection(const std::filesystem::path& path) {
  const Json j = read_json(path);
  const std::string src = path.string();
  SelectionFile s;
  s.p = positive_int(j, "p", src);
  s.selected = model_from_json(field(j, "selected_indices", src), s.p, src + ": selected_indices");
  const Json& beta = field(j, "beta_hat", src);
  if (!beta.is_array() || beta.size() != s.selected.size()) {
    throw io::ParseError(src + ": beta_hat must have one entry per selected index");
  }
  s.beta_hat.resize(static_cast<Eigen::Index>(beta.size()));
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!beta[i].is_number()) throw io::ParseError(src + ": beta_hat entries must be numbers");
    s.beta_hat[static_cast<Eigen::Index>(i)] = beta[i].get<double>();
  }
  if (j.contains("intercept") && j["intercept"].is_number()) s.intercept = j["intercept"].get<double>();
  return s;
}

Json evaluation_json(const std::vector<ReplicateReport>& reports, const ReportAverage& mean) {
  Json rows = Json::array();
  for (const auto& r : reports) {
    const auto& c = r.report.counts;
    rows.push_back({{"replicate", r.name},
                    {"precision", optional_number(r.report.precision)},
                    {"sensitivity", optional_number(r.report.sensitivity)},
                    {"specificity", optional_number(r.report.specificity)},
                    {"mcc", r.report.mcc},
                    {"mspe", optional_number(r.report.mspe)},
                    {"tp", c.tp},
                    {"tn", c.tn},
                    {"fp", c.fp},
                    {"fn", c.fn}});
  }
  Json j;
  j["replicates"] = std::move(rows);
  j["mean"] = {{"precision", optional_number(mean.precision)},
               {"sensitivity", optional_number(mean.sensitivity)},
               {"specificity", optional_number(mean.specificity)},
               {"mcc", optional_number(mean.mcc)},
               {"mspe", optional_number(mean.mspe)}};
  j["n_defined"] = {{"precision", mean.n_precision},
                    {"sensitivity", mean.n_sensitivity},
                    {"specificity", mean.n_specificity},
                    {"mcc", mean.n_mcc},
                    {"mspe", mean.n_mspe}};
  j["n_replicates"] = mean.replicates;
  return j;
}

std::string evaluation_csv(const std::vector<ReplicateReport>& reports, const ReportAverage& mean) {
  std::string out = "replicate,precision,sensitivity,specificity,mcc,mspe,tp,tn,fp,fn\n";
  for (const auto& r : reports) {
    const auto& c = r.report.counts;
    out += r.name + ',' + csv_cell(r.report.precision) + ',' + csv_cell(r.report.sensitivity) + ',' +
           csv_cell(r.report.specificity) + ',' + io::format_double(r.report.mcc) + ',' +
           csv_cell(r.report.mspe) + ',' + std::to_string(c.tp) + ',' + std::to_string(c.tn) + ',' +
           std::to_string(c.fp) + ',' + std::to_string(c.fn) + '\n';
  }
  out += "mean," + csv_cell(mean.precision) + ',' + csv_cell(mean.sensitivity) + ',' +
         csv_cell(mean.specificity) + ',' + csv_cell(mean.mcc) + ',' + csv_cell(mean.mspe) + ",NA,NA,NA,NA\n";
  out += "n_defined," + std::to_string(mean.n_precision) + ',' + std::to_string(mean.n_sensitivity) + ',' +
         std::to_string(mean.n_specificity) + ',' + std::to_string(mean.n_mcc) + ',' +
         std::to_string(mean.n_mspe) + ",NA,NA,NA,NA\n";
  return out;
}

void write_json(const std::filesystem::path& path, const Json& j) { io::write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw io::ParseError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace nlpsel::cli
