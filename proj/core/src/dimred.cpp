#include "qbench/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qbench/rng.hpp"

namespace qbench {

std::string_view to_string(ReductionMethod m) {
  switch (m) {
    case ReductionMethod::kSvd: return "svd";
    case ReductionMethod::kPca: return "pca";
    case ReductionMethod::kSkpp: return "skpp";
    case ReductionMethod::kLda: return "lda";
    case ReductionMethod::kLdaSplit: return "lda_split";
    case ReductionMethod::kIdentity: return "none";
  }
  return "?";
}

ReductionMethod parse_reduction_method(std::string_view name) {
  if (name == "svd") return ReductionMethod::kSvd;
  if (name == "pca") return ReductionMethod::kPca;
  if (name == "skpp") return ReductionMethod::kSkpp;
  if (name == "lda") return ReductionMethod::kLda;
  if (name == "lda_split" || name == "lda-split") return ReductionMethod::kLdaSplit;
  if (name == "identity" || name == "none") return ReductionMethod::kIdentity;
  throw std::invalid_argument("unknown reduction method '" + std::string(name) + "'");
}

double kurtosis(std::span<const double> z) {
  if (z.size() < 2) throw std::domain_error("kurtosis: need at least two samples");
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : z) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw std::domain_error("kurtosis: zero variance");
  return m4 / (m2 * m2);
}

namespace {

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

void require_rows(const DataTable& t, const char* who) {
  if (t.n_samples() == 0) throw std::invalid_argument(std::string(who) + ": empty training table");
}

void require_components(const DataTable& t, std::size_t k, const char* who) {
  if (k == 0 || k > t.n_features())
    throw std::invalid_argument(std::string(who) + ": n_components must be in [1, n_features]");
}

// Removes from v its components along the first `count` columns of q.
void orthogonalize(std::span<double> v, const Matrix& q, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < count; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) proj += q(i, k) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * q(i, k);
    }
  }
}

// Unit vector orthogonal to the first `count` columns of q, chosen from the
// standard basis with the largest residual.
std::vector<double> complement_direction(const Matrix& q, std::size_t count) {
  const std::size_t d = q.rows();
  std::vector<double> best;
  double best_norm = -1.0;
  for (std::size_t e = 0; e < d; ++e) {
    std::vector<double> v(d, 0.0);
    v[e] = 1.0;
    orthogonalize(v, q, count);
    const double nrm = norm2(v);
    if (nrm > best_norm + 1e-12) {
      best_norm = nrm;
      best = std::move(v);
    }
  }
  for (double& x : best) x /= best_norm;
  return best;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  const std::size_t d = x.cols();
  Matrix cov(d, d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double di = row[i] - mean[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += di * (row[j] - mean[j]);
    }
  }
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) cov(j, i) = cov(i, j) = cov(i, j) / n;
  return cov;
}

}  // namespace

Reducer fit_pca(const DataTable& train, std::size_t n_components) {
  require_rows(train, "fit_pca");
  require_components(train, n_components, "fit_pca");
  Reducer r;
  r.method = ReductionMethod::kPca;
  r.mean = column_means(train.features);
  const auto eig = eig_symmetric(covariance(train.features, r.mean));
  r.projection = Matrix(train.n_features(), n_components);
  for (std::size_t k = 0; k < n_components; ++k) r.projection.set_column(k, eig.eigenvectors.column(k));

  const double lead = std::max(std::abs(eig.eigenvalues.front()), 1e-300);
  const std::size_t last = std::min(n_components, eig.eigenvalues.size() - 1);
  bool degenerate = false;
  for (std::size_t k = 0; k < last; ++k)
    if (eig.eigenvalues[k] - eig.eigenvalues[k + 1] < 0.1 * lead) degenerate = true;
  r.metadata["degenerate"] = degenerate ? 1.0 : 0.0;
  for (std::size_t k = 0; k < n_components; ++k) r.metadata["eigenvalue_" + std::to_string(k)] = eig.eigenvalues[k];
  return r;
}

Reducer fit_svd(const DataTable& train, std::size_t n_components) {
  require_rows(train, "fit_svd");
  require_components(train, n_components, "fit_svd");
  Reducer r;
  r.method = ReductionMethod::kSvd;
  r.mean.assign(train.n_features(), 0.0);
  const auto dec = svd(train.features);
  const std::size_t available = dec.singular_values.size();
  r.projection = Matrix(train.n_features(), n_components);
  for (std::size_t k = 0; k < std::min(available, n_components); ++k) {
    const auto v = dec.vt.row(k);
    r.projection.set_column(k, v);
    r.metadata["singular_value_" + std::to_string(k)] = dec.singular_values[k];
  }
  r.metadata["rank_deficient"] = 0.0;
  for (std::size_t k = available; k < n_components; ++k) {
    auto v = complement_direction(r.projection, k);
    canonicalize_sign(v);
    r.projection.set_column(k, v);
    r.metadata["rank_deficient"] = 1.0;
  }
  return r;
}

namespace {

struct ClassBlock {
  Matrix centred;  // class rows minus the class mean
  double weight = 0.0;
};

std::vector<ClassBlock> class_blocks(const DataTable& train) {
  std::vector<ClassBlock> blocks;
  const double n = static_cast<double>(train.n_samples());
  for (Label c : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < train.labels.size(); ++i)
      if (train.labels[i] == c) idx.push_back(i);
    if (idx.size() < 2) continue;
    ClassBlock b;
    b.centred = train.features.select_rows(idx);
    const auto mean = column_means(b.centred);
    for (std::size_t r = 0; r < b.centred.rows(); ++r)
      for (std::size_t j = 0; j < b.centred.cols(); ++j) b.centred(r, j) -= mean[j];
    b.weight = static_cast<double>(idx.size()) / n;
    blocks.push_back(std::move(b));
  }
  return blocks;
}

// Objective and (optionally) its Euclidean gradient.
double pooled_objective(const std::vector<ClassBlock>& blocks, std::span<const double> w, std::vector<double>* grad) {
  double total = 0.0;
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  std::vector<double> g2;
  std::vector<double> g4;
  for (const auto& b : blocks) {
    const std::size_t n = b.centred.rows();
    const std::size_t d = b.centred.cols();
    double m2 = 0.0;
    double m4 = 0.0;
    if (grad) {
      g2.assign(d, 0.0);
      g4.assign(d, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = b.centred.row(i);
      const double z = dot(row, w);
      const double z2 = z * z;
      m2 += z2;
      m4 += z2 * z2;
      if (grad) {
        const double z3 = z2 * z;
        for (std::size_t j = 0; j < d; ++j) {
          g2[j] += z * row[j];
          g4[j] += z3 * row[j];
        }
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    m2 *= inv_n;
    m4 *= inv_n;
    if (!(m2 > 1e-300)) continue;  // class collapses onto a point along w
    const double k = m4 / (m2 * m2);
    total += b.weight * k;
    if (grad) {
      for (std::size_t j = 0; j < d; ++j) {
        const double dm2 = 2.0 * inv_n * g2[j];
        const double dm4 = 4.0 * inv_n * g4[j];
        (*grad)[j] += b.weight * (dm4 / (m2 * m2) - 2.0 * m4 * dm2 / (m2 * m2 * m2));
      }
    }
  }
  return total;
}

}  // namespace

double pooled_class_kurtosis(const DataTable& train, std::span<const double> w) {
  if (w.size() != train.n_features()) throw std::invalid_argument("pooled_class_kurtosis: dimension mismatch");
  const double nrm = norm2(w);
  std::vector<double> unit(w.begin(), w.end());
  for (double& x : unit) x /= nrm;
  return pooled_objective(class_blocks(train), unit, nullptr);
}

Reducer fit_skpp(const DataTable& train, std::size_t n_components, const SkppOptions& options) {
  require_rows(train, "fit_skpp");
  require_components(train, n_components, "fit_skpp");
  const std::size_t d = train.n_features();
  const auto blocks = class_blocks(train);
  if (blocks.empty()) throw std::invalid_argument("fit_skpp: need a class with at least two samples");
  const double sign = options.goal == KurtosisGoal::kMinimize ? 1.0 : -1.0;

  Reducer r;
  r.method = ReductionMethod::kSkpp;
  r.mean = column_means(train.features);
  r.projection = Matrix(d, n_components);
  Rng rng(options.seed);

  std::vector<double> grad(d);
  std::vector<double> dir(d);
  std::vector<double> trial(d);
  for (std::size_t k = 0; k < n_components; ++k) {
    const bool free_direction = d - k > 1;
    std::vector<double> best_w;
    double best_value = 0.0;
    bool improved = false;
    const std::size_t restarts = free_direction ? std::max<std::size_t>(1, options.restarts) : 1;

    for (std::size_t s = 0; s < restarts; ++s) {
      std::vector<double> w(d);
      double nrm = 0.0;
      while (nrm < 1e-8) {
        for (double& x : w) x = rng.normal();
        orthogonalize(w, r.projection, k);
        nrm = norm2(w);
      }
      for (double& x : w) x /= nrm;

      const double start = sign * pooled_objective(blocks, w, nullptr);
      double value = start;
      double step = 0.5;
      for (int it = 0; it < options.max_iterations && free_direction; ++it) {
        pooled_objective(blocks, w, &grad);
        for (double& g : grad) g *= sign;
        // Riemannian gradient restricted to the orthogonal complement.
        const double radial = dot(grad, w);
        for (std::size_t j = 0; j < d; ++j) dir[j] = -(grad[j] - radial * w[j]);
        orthogonalize(dir, r.projection, k);
        const double gnorm = norm2(dir);
        if (gnorm < 1e-10) break;
        for (double& x : dir) x /= gnorm;

        bool accepted = false;
        while (step > 1e-10) {
          for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] + step * dir[j];
          orthogonalize(trial, r.projection, k);
          const double tn = norm2(trial);
          for (double& x : trial) x /= tn;
          const double tv = sign * pooled_objective(blocks, trial, nullptr);
          if (tv <= value - 1e-4 * step * gnorm) {
            w.swap(trial);
            const double gain = value - tv;
            value = tv;
            accepted = true;
            step = std::min(1.0, 2.0 * step);
            if (gain <= 1e-13 * std::max(1.0, std::abs(value))) step = 0.0;
            break;
          }
          step *= 0.5;
        }
        if (!accepted || step == 0.0) break;
      }
      if (value < start) improved = true;
      if (best_w.empty() || value < best_value) {
        best_value = value;
        best_w = w;
      }
    }

    if (free_direction && !improved)
      throw std::runtime_error("fit_skpp: no restart improved the kurtosis index for component " + std::to_string(k));
    canonicalize_sign(best_w);
    r.projection.set_column(k, best_w);
    r.metadata["index_" + std::to_string(k)] = sign * best_value;
  }
  return r;
}

double fisher_ratio(const Matrix& features, std::span<const Label> labels, std::span<const double> w) {
  if (features.cols() != w.size() || features.rows() != labels.size())
    throw std::invalid_argument("fisher_ratio: dimension mismatch");
  double sum[2] = {0.0, 0.0};
  double sq[2] = {0.0, 0.0};
  double cnt[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    const double z = dot(features.row(i), w);
    sum[c] += z;
    sq[c] += z * z;
    cnt[c] += 1.0;
  }
  if (cnt[0] == 0.0 || cnt[1] == 0.0) throw std::domain_error("fisher_ratio: a class is absent");
  const double m0 = sum[0] / cnt[0];
  const double m1 = sum[1] / cnt[1];
  const double within = (sq[0] - cnt[0] * m0 * m0 + sq[1] - cnt[1] * m1 * m1) / (cnt[0] + cnt[1]);
  const double between = (m1 - m0) * (m1 - m0);
  if (!(within > 0.0)) return between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return between / within;
}

namespace {

// Fisher direction for a two-class feature matrix. Returns false when the
// class means coincide.
bool fisher_direction(const Matrix& x, std::span<const Label> labels, std::vector<double>& w) {
  const std::size_t d = x.cols();
  std::vector<double> mu[2] = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  double cnt[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    cnt[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) mu[c][j] += x(i, j);
  }
  if (cnt[0] == 0.0 || cnt[1] == 0.0) throw std::domain_error("fit_lda: both classes must be present");
  for (int c = 0; c < 2; ++c)
    for (double& m : mu[c]) m /= cnt[c];

  Matrix sw(d, d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto& m = mu[static_cast<std::size_t>(labels[i])];
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - m[a];
      for (std::size_t b = a; b < d; ++b) sw(a, b) += da * (x(i, b) - m[b]);
    }
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) sw(b, a) = sw(a, b);
    trace += sw(a, a);
  }
  const double eps = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1.0;
  for (std::size_t a = 0; a < d; ++a) sw(a, a) += eps;

  std::vector<double> delta(d);
  double scale = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    delta[j] = mu[1][j] - mu[0][j];
    scale = std::max({scale, std::abs(mu[0][j]), std::abs(mu[1][j])});
  }
  scale = std::max(scale, std::sqrt(trace / (cnt[0] + cnt[1])));
  if (norm2(delta) <= 1e-10 * scale) return false;

  w = cholesky_solve(sw, delta);
  const double nrm = norm2(w);
  for (double& v : w) v /= nrm;
  canonicalize_sign(w);
  return true;
}

}  // namespace

Reducer fit_lda(const DataTable& train) {
  require_rows(train, "fit_lda");
  std::vector<double> w;
  if (!fisher_direction(train.features, train.labels, w))
    throw std::domain_error("fit_lda: class means coincide (zero between-class scatter)");
  Reducer r;
  r.method = ReductionMethod::kLda;
  r.mean = column_means(train.features);
  r.projection = Matrix(train.n_features(), 1);
  r.projection.set_column(0, w);
  r.metadata["fisher_ratio_0"] = fisher_ratio(train.features, train.labels, w);
  return r;
}

Reducer fit_lda_split(const DataTable& train, std::uint64_t seed, FeatureSplit split) {
  require_rows(train, "fit_lda_split");
  const std::size_t d = train.n_features();
  if (d < 2) throw std::invalid_argument("fit_lda_split: need at least two features");
  if (train.count(0) == 0 || train.count(1) == 0) throw std::domain_error("fit_lda_split: both classes must be present");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  if (split == FeatureSplit::kRandom) {
    Rng rng(seed);
    rng.shuffle(std::span(order));
  }
  const std::size_t first = (d + 1) / 2;

  Reducer r;
  r.method = ReductionMethod::kLdaSplit;
  r.mean = column_means(train.features);
  r.projection = Matrix(d, 2);
  r.metadata["random_split"] = split == FeatureSplit::kRandom ? 1.0 : 0.0;

  for (std::size_t h = 0; h < 2; ++h) {
    const std::size_t lo = h == 0 ? 0 : first;
    const std::size_t hi = h == 0 ? first : d;
    Matrix half(train.n_samples(), hi - lo);
    for (std::size_t i = 0; i < train.n_samples(); ++i)
      for (std::size_t j = lo; j < hi; ++j) half(i, j - lo) = train.features(i, order[j]);

    std::vector<double> w;
    const std::string tag = std::to_string(h);
    if (fisher_direction(half, train.labels, w)) {
      r.metadata["degenerate_half_" + tag] = 0.0;
    } else {
      w.assign(hi - lo, 0.0);
      w[0] = 1.0;
      r.metadata["degenerate_half_" + tag] = 1.0;
    }
    const double ratio = fisher_ratio(half, train.labels, w);
    r.metadata["fisher_ratio_" + tag] = ratio;
    r.metadata["weak_half_" + tag] = ratio < 0.1 ? 1.0 : 0.0;
    for (std::size_t j = lo; j < hi; ++j) r.projection(order[j], h) = w[j - lo];
  }
  return r;
}

Reducer identity_reducer(std::size_t n_features) {
  Reducer r;
  r.method = ReductionMethod::kIdentity;
  r.mean.assign(n_features, 0.0);
  r.projection = Matrix::identity(n_features);
  return r;
}

Matrix transform(const Reducer& reducer, const Matrix& features) {
  if (features.cols() != reducer.n_features())
    throw std::invalid_argument("transform: expected " + std::to_string(reducer.n_features()) + " features, got " +
                                std::to_string(features.cols()));
  Matrix out(features.rows(), reducer.components());
  std::vector<double> centred(features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) centred[j] = row[j] - reducer.mean[j];
    for (std::size_t k = 0; k < reducer.components(); ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < centred.size(); ++j) s += centred[j] * reducer.projection(j, k);
      out(r, k) = s;
    }
  }
  return out;
}

std::vector<double> transform(const Reducer& reducer, std::span<const double> x) {
  Matrix one(1, x.size(), std::vector<double>(x.begin(), x.end()));
  const Matrix y = transform(reducer, one);
  return {y.data().begin(), y.data().end()};
}

DataTable transform(const Reducer& reducer, const DataTable& table) {
  DataTable out;
  out.features = transform(reducer, table.features);
  out.labels = table.labels;
  for (std::size_t k = 0; k < reducer.components(); ++k)
    out.feature_names.push_back(std::string(to_string(reducer.method)) + "_" + std::to_string(k));
  return out;
}

void write_reducer(const Reducer& reducer, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "qbench-reducer 1\n";
  out << "method " << to_string(reducer.method) << '\n';
  out << "n_features " << reducer.n_features() << '\n';
  out << "components " << reducer.components() << '\n';
  for (const auto& [key, value] : reducer.metadata) out << "meta " << key << ' ' << value << '\n';
  out << "mean";
  for (double m : reducer.mean) out << ' ' << m;
  out << "\nprojection\n";
  for (std::size_t i = 0; i < reducer.n_features(); ++i) {
    for (std::size_t k = 0; k < reducer.components(); ++k) out << (k ? " " : "") << reducer.projection(i, k);
    out << '\n';
  }
  out.precision(old_precision);
}

Reducer read_reducer(std::istream& in) {
  auto fail = [](const std::string& why) { return std::invalid_argument("read_reducer: " + why); };
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "qbench-reducer" || version != 1) throw fail("bad header");
  Reducer r;
  std::size_t d = 0;
  std::size_t k = 0;
  while (in >> word) {
    if (word == "method") {
      std::string name;
      in >> name;
      r.method = parse_reduction_method(name);
    } else if (word == "n_features") {
      in >> d;
    } else if (word == "components") {
      in >> k;
    } else if (word == "meta") {
      std::string key;
      double value = 0.0;
      in >> key >> value;
      r.metadata[key] = value;
    } else if (word == "mean") {
      r.mean.resize(d);
      for (double& m : r.mean) in >> m;
    } else if (word == "projection") {
      r.projection = Matrix(d, k);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < k; ++j) in >> r.projection(i, j);
      break;
    } else {
      throw fail("unexpected token '" + word + "'");
    }
    if (!in) throw fail("truncated input");
  }
  if (!in || r.mean.size() != d || r.projection.rows() != d) throw fail("incomplete reducer");
  return r;
}

}  // namespace qbench
