#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qbench/classical.hpp"

namespace qbench {

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double gini(std::span<const double> probabilities) {
  double g = 1.0;
  for (double p : probabilities) g -= p * p;
  return g;
}

TreeModel::TreeModel(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {}

double TreeModel::probability(std::span<const double> x) const {
  check_dimension(x.size());
  int at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(at)].probability;
}

Label TreeModel::predict(std::span<const double> x) const { return probability(x) > 0.5 ? 1 : 0; }

std::size_t TreeModel::depth() const {
  std::function<std::size_t(int)> walk = [&](int i) -> std::size_t {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

class CartBuilder {
 public:
  CartBuilder(const DataTable& t, SplitCriterion criterion, std::size_t max_depth)
      : t_(t), criterion_(criterion), max_depth_(max_depth) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(t_.n_samples());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  double impurity(double ones, double total) const {
    if (total <= 0.0) return 0.0;
    const double p[2] = {1.0 - ones / total, ones / total};
    return criterion_ == SplitCriterion::kGini ? gini(p) : entropy(p);
  }

  int grow(std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double ones = 0.0;
    for (std::size_t i : idx) ones += t_.labels[i];
    const double total = static_cast<double>(idx.size());
    nodes_.back().probability = ones / total;
    nodes_.back().samples = idx.size();

    const bool pure = ones == 0.0 || ones == total;
    if (pure || (max_depth_ > 0 && depth >= max_depth_) || idx.size() < 2) return id;

    const double parent = impurity(ones, total);
    double best_gain = -std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> sorted = idx;
    for (std::size_t f = 0; f < t_.n_features(); ++f) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return t_.features(a, f) < t_.features(b, f); });
      double left_ones = 0.0;
      for (std::size_t s = 0; s + 1 < sorted.size(); ++s) {
        left_ones += t_.labels[sorted[s]];
        const double lo = t_.features(sorted[s], f);
        const double hi = t_.features(sorted[s + 1], f);
        if (!(hi > lo)) continue;
        const double nl = static_cast<double>(s + 1);
        const double nr = total - nl;
        const double gain =
            parent - (nl / total) * impurity(left_ones, nl) - (nr / total) * impurity(ones - left_ones, nr);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = lo + 0.5 * (hi - lo);
          // Midpoint can round up to hi for adjacent doubles.
          if (!(best_threshold < hi)) best_threshold = lo;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx)
      (t_.features(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    const int l = grow(left, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    const int r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const DataTable& t_;
  SplitCriterion criterion_;
  std::size_t max_depth_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::unique_ptr<TreeModel> train_cart(const DataTable& train, SplitCriterion criterion, std::size_t max_depth) {
  train.validate();
  if (train.n_samples() == 0) throw std::invalid_argument("train_cart: empty training table");
  return std::make_unique<TreeModel>(CartBuilder(train, criterion, max_depth).build(), train.n_features());
}

}  // namespace qbench
