#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qbench/metrics.hpp"

namespace qbench {

ConfusionCounts confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: " + std::to_string(y_true.size()) + " true labels vs " +
                                std::to_string(y_pred.size()) + " predictions");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const Label t = y_true[i];
    const Label p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("confusion: label outside {0, 1} at position " + std::to_string(i));
    if (t == 1) {
      ++(p == 1 ? c.tp : c.fn);
    } else {
      ++(p == 1 ? c.fp : c.tn);
    }
  }
  return c;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kPrecision: return "precision";
    case Metric::kRecall: return "recall";
    case Metric::kF1: return "f1";
    case Metric::kMcc: return "mcc";
    case Metric::kBalancedAccuracy: return "balanced_accuracy";
  }
  return "?";
}

std::string_view short_label(Metric m) {
  switch (m) {
    case Metric::kPrecision: return "Precision";
    case Metric::kRecall: return "Recall";
    case Metric::kF1: return "F1";
    case Metric::kMcc: return "MCC";
    case Metric::kBalancedAccuracy: return "BA";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

double MetricSet::value(Metric m) const {
  switch (m) {
    case Metric::kPrecision: return precision;
    case Metric::kRecall: return recall;
    case Metric::kF1: return f1;
    case Metric::kMcc: return mcc;
    case Metric::kBalancedAccuracy: return balanced_accuracy;
  }
  return 0.0;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

MetricSet metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("metrics: no samples");
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);
  MetricSet m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.mcc = ratio(tp * tn - fp * fn, std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)));
  m.balanced_accuracy = 0.5 * (m.recall + ratio(tn, tn + fp));
  m.missing_positive = c.tp + c.fn == 0;
  m.missing_negative = c.tn + c.fp == 0;
  return m;
}

EvalReport aggregate(std::span<const MetricSet> per_fold) {
  if (per_fold.empty()) throw std::invalid_argument("aggregate: no folds");
  EvalReport r;
  r.folds.assign(per_fold.begin(), per_fold.end());
  const double n = static_cast<double>(per_fold.size());
  for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
    const double first = per_fold.front().value(kAllMetrics[k]);
    double shift = 0.0;
    for (const auto& f : per_fold) shift += f.value(kAllMetrics[k]) - first;
    const double mean = first + shift / n;
    double var = 0.0;
    for (const auto& f : per_fold) {
      const double d = f.value(kAllMetrics[k]) - mean;
      var += d * d;
    }
    r.summary[k] = {mean, std::sqrt(var / n)};
  }
  return r;
}

std::string format_cell(const MetricSummary& s, bool with_std) {
  char buf[64];
  if (with_std) {
    std::snprintf(buf, sizeof buf, "%.2f (%.2f)", 100.0 * s.mean, 100.0 * s.std);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * s.mean);
  }
  return buf;
}

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string display_name(const std::string& model) {
  std::string out = model;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::toupper(ch); });
  return out;
}

}  // namespace

void write_results_csv(std::span<const EvalReport> reports, std::ostream& out) {
  out << "dataset,reducer,model,metric,mean,std,seed\n";
  for (const auto& r : reports) {
    const std::string prefix = csv_field(r.dataset) + ',' + csv_field(r.reducer) + ',' + csv_field(r.model) + ',';
    if (r.failed()) {
      out << prefix << "failed,,," << r.seed << '\n';
      continue;
    }
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k)
      out << prefix << to_string(kAllMetrics[k]) << ',' << exact(r.summary[k].mean) << ','
          << exact(r.summary[k].std) << ',' << r.seed << '\n';
  }
}

std::vector<EvalReport> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("dataset,reducer,model,metric", 0) != 0)
    throw std::runtime_error("read_results_csv: missing header");
  std::vector<EvalReport> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_record(line);
    if (f.size() != 7) throw std::runtime_error("read_results_csv: expected 7 fields in '" + line + "'");
    const std::uint64_t seed = std::stoull(f[6]);
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalReport& r) {
      return r.dataset == f[0] && r.reducer == f[1] && r.model == f[2] && r.seed == seed;
    });
    if (it == out.end()) {
      EvalReport r;
      r.dataset = f[0];
      r.reducer = f[1];
      r.model = f[2];
      r.seed = seed;
      out.push_back(std::move(r));
      it = out.end() - 1;
    }
    if (f[3] == "failed") {
      it->failure = "failed";
      continue;
    }
    const auto k = static_cast<std::size_t>(parse_metric(f[3]));
    it->summary[k] = {std::stod(f[4]), std::stod(f[5])};
  }
  return out;
}

void write_table(std::span<const EvalReport> reports, const std::string& title, std::ostream& out) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Model"};
  for (Metric m : kAllMetrics) header.emplace_back(short_label(m));
  rows.push_back(header);
  for (const auto& r : reports) {
    std::vector<std::string> row{display_name(r.model)};
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k)
      row.push_back(r.failed() ? "failed" : format_cell(r.summary[k], !r.single_split));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  out << title << '\n';
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
  for (const auto& r : reports)
    if (r.failed()) out << "# " << display_name(r.model) << " failed: " << r.failure << '\n';
}

void emit_plotdata(std::span<const EvalReport> reports, const std::filesystem::path& path) {
  if (reports.empty()) throw std::invalid_argument("emit_plotdata: no reports");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_plotdata: cannot write " + path.string());
  out << "model reducer";
  for (Metric m : kAllMetrics) out << ' ' << to_string(m);
  out << '\n';
  for (const auto& r : reports) {
    if (r.failed()) continue;
    out << r.model << ' ' << r.reducer;
    for (const auto& s : r.summary) out << ' ' << exact(s.mean);
    out << '\n';
  }
  if (!out) throw std::runtime_error("emit_plotdata: write failed for " + path.string());
}

std::vector<PlotGroup> read_plotdata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_plotdata: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<PlotGroup> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    PlotGroup g;
    ls >> g.model >> g.reducer;
    for (auto& v : g.values) {
      std::string tok;
      ls >> tok;
      v = std::stod(tok);
    }
    if (!ls) throw std::runtime_error("read_plotdata: malformed line '" + line + "'");
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace qbench
