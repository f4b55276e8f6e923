#pragma once

// On-disk formats of the nlp_select tool: truth.json, selection JSON and the
// evaluation table. Indices are 1-based in every file.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlpsel/laplace.hpp"
#include "nlpsel/metrics.hpp"
#include "nlpsel/search.hpp"
#include "nlpsel/simulate.hpp"

namespace nlpsel::cli {

using Json = nlohmann::ordered_json;

Json to_json(const ModelIndex& k);  // 1-based array
ModelIndex model_from_json(const Json& j, int p, const std::string& what);

Json truth_json(const SimDesign& design, const Truth& truth);

struct TruthFile {
  int p = 0;
  ModelIndex support;
};
TruthFile read_truth(const std::filesystem::path& path);

struct FitSettings {
  HyperPmomConfig prior;
  SearchConfig search;
  int n = 0;
  int p = 0;
};

Json selection_json(const FitSettings& settings, const SearchTrace& trace);

struct SelectionFile {
  int p = 0;
  ModelIndex selected;
  Vector beta_hat;
  double intercept = 0.0;
};
SelectionFile read_selection(const std::filesystem::path& path);

struct ReplicateReport {
  std::string name;
  SelectionReport report;
};

Json evaluation_json(const std::vector<ReplicateReport>& reports, const ReportAverage& mean);
std::string evaluation_csv(const std::vector<ReplicateReport>& reports, const ReportAverage& mean);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace nlpsel::cli
