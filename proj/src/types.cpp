#include "nlpsel/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlpsel {

namespace {

void require_sorted_unique(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) {
      throw std::invalid_argument("ModelIndex: indices must be strictly increasing");
    }
  }
}

}  // namespace

ModelIndex::ModelIndex(std::initializer_list<int> indices) : indices_(indices) {
  require_sorted_unique(indices_);
}

ModelIndex::ModelIndex(std::vector<int> indices) : indices_(std::move(indices)) {
  require_sorted_unique(indices_);
}

void ModelIndex::check(int p) const {
  for (int j : indices_) {
    if (j < 0 || j >= p) {
      throw std::invalid_argument("ModelIndex: index " + std::to_string(j) +
                                  " out of range for p=" + std::to_string(p));
    }
  }
}

bool ModelIndex::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

ModelIndex ModelIndex::with(int j) const {
  ModelIndex out;
  out.indices_.reserve(indices_.size() + 1);
  auto pos = std::lower_bound(indices_.begin(), indices_.end(), j);
  if (pos != indices_.end() && *pos == j) return *this;
  out.indices_.insert(out.indices_.end(), indices_.begin(), pos);
  out.indices_.push_back(j);
  out.indices_.insert(out.indices_.end(), pos, indices_.end());
  return out;
}

ModelIndex ModelIndex::without(int j) const {
  ModelIndex out;
  out.indices_.reserve(indices_.size());
  for (int i : indices_) {
    if (i != j) out.indices_.push_back(i);
  }
  return out;
}

ModelIndex ModelIndex::swapped(int out, int in) const { return without(out).with(in); }

std::string ModelIndex::to_string(int base) const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) os << ',';
    os << indices_[i] + base;
  }
  os << '}';
  return os.str();
}

std::size_t ModelIndexHash::operator()(const ModelIndex& k) const noexcept {
  // FNV-1a over the index words
  std::size_t h = 1469598103934665603ULL;
  for (int j : k) {
    h ^= static_cast<std::size_t>(j) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return h ^ k.size();
}

Dataset::Dataset(Matrix x, Vector y)
    : Dataset(std::move(x), std::move(y), Vector(), Vector()) {}

Dataset::Dataset(Matrix x, Vector y, Vector means, Vector sds)
    : x_(std::move(x)), y_(std::move(y)), means_(std::move(means)), sds_(std::move(sds)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw std::invalid_argument("Dataset: need n >= 1 and p >= 1");
  }
  if (y_.size() != x_.rows()) {
    throw std::invalid_argument("Dataset: response length " + std::to_string(y_.size()) +
                                " does not match " + std::to_string(x_.rows()) + " rows");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_[i] != 0.0 && y_[i] != 1.0) {
      throw std::invalid_argument("Dataset: response entry " + std::to_string(i + 1) +
                                  " is not 0 or 1");
    }
  }
  if (!x_.allFinite()) throw std::invalid_argument("Dataset: design has non-finite entries");
  if (means_.size() == 0) means_ = Vector::Zero(x_.cols());
  if (sds_.size() == 0) sds_ = Vector::Ones(x_.cols());
}

Dataset Dataset::standardize(Matrix x, Vector y) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw std::invalid_argument("Dataset: standardization needs n >= 2");
  Vector means = x.colwise().mean();
  Vector sds(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j).array() -= means[j];
    const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(means[j])))) {
      throw std::invalid_argument("Dataset: column x" + std::to_string(j + 1) +
                                  " is constant and cannot be standardized");
    }
    sds[j] = sd;
    x.col(j) /= sd;
  }
  return Dataset(std::move(x), std::move(y), std::move(means), std::move(sds));
}

Dataset Dataset::apply_standardization(Matrix x, Vector y, const Vector& means,
                                       const Vector& sds) {
  if (means.size() != x.cols() || sds.size() != x.cols()) {
    throw std::invalid_argument("Dataset: standardization has wrong length");
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j) = (x.col(j).array() - means[j]) / sds[j];
  }
  return Dataset(std::move(x), std::move(y), means, sds);
}

ActiveDesign ActiveDesign::from(const Dataset& data, const ModelIndex& k, bool intercept) {
  k.check(data.p());
  ActiveDesign d;
  const auto m = static_cast<Eigen::Index>(k.size());
  d.x.resize(data.n(), m + (intercept ? 1 : 0));
  for (Eigen::Index j = 0; j < m; ++j) d.x.col(j) = data.x().col(k[j]);
  if (intercept) d.x.col(m).setOnes();
  d.y = data.y();
  return d;
}

Vector embed(const ModelIndex& k, const Vector& beta, int p) {
  if (static_cast<Eigen::Index>(k.size()) != beta.size()) {
    throw std::invalid_argument("embed: coefficient length does not match model size");
  }
  k.check(p);
  Vector out = Vector::Zero(p);
  for (std::size_t i = 0; i < k.size(); ++i) out[k[i]] = beta[static_cast<Eigen::Index>(i)];
  return out;
}

}  // namespace nlpsel
