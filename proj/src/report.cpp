#include "texbench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "texbench/errors.hpp"

namespace texbench {
namespace {

std::string display_name(const std::string& classifier) {
  if (classifier == "svm") return "SVM";
  if (classifier == "tree") return "DT";
  if (classifier == "mlp") return "ANN";
  return classifier;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ms);
  return buf;
}

// Index of the largest value; -1 when none.
int best_index(const std::vector<const double*>& values) {
  int best = -1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (best < 0 || *values[i] > *values[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ResultsDocument render_report(std::span<const EvalReport> reports,
                              std::span<const std::string> absent) {
  ResultsDocument doc;
  std::ostringstream results;
  std::ostringstream summary;
  results << kResultsHeader << '\n';
  summary << kSummaryHeader << '\n';

  std::vector<std::string> extractors;
  std::vector<std::string> classifiers;
  std::map<std::pair<std::string, std::string>, const EvalReport*> cells;
  std::map<std::string, std::size_t> dims;

  for (const auto& r : reports) {
    const auto& in = r.info;
    for (const auto& f : r.folds) {
      results << csv_field(in.extractor) << ',' << csv_field(in.extractor_params) << ','
              << csv_field(in.classifier) << ',' << csv_field(in.classifier_params) << ','
              << f.fold + 1 << ',' << format_percent(f.accuracy) << ',' << f.n_train << ','
              << f.n_test << ',' << in.seed << ',' << format_ms(f.train_ms + f.predict_ms) << '\n';
    }
    summary << csv_field(in.extractor) << ',' << csv_field(in.extractor_params) << ','
            << csv_field(in.classifier) << ',' << csv_field(in.classifier_params) << ',' << in.dim
            << ',' << r.k << ',' << format_percent(r.mean) << ',' << format_percent(r.std) << ','
            << format_percent(r.min_accuracy()) << ',' << format_percent(r.max_accuracy()) << ','
            << in.seed << '\n';

    if (std::find(extractors.begin(), extractors.end(), in.extractor) == extractors.end()) {
      extractors.push_back(in.extractor);
    }
    if (std::find(classifiers.begin(), classifiers.end(), in.classifier) == classifiers.end()) {
      classifiers.push_back(in.classifier);
    }
    cells[{in.extractor, in.classifier}] = &r;
    dims[in.extractor] = in.dim;
  }
  doc.results_csv = results.str();
  doc.summary_csv = summary.str();

  int k = 0;
  for (const auto& r : reports) k = std::max(k, r.k);

  std::ostringstream t;
  t << "Cross-validated accuracy (%), k = " << k << ". '*' marks the best cell of each row.\n\n";
  t << "| Features | Fold |";
  for (const auto& c : classifiers) t << ' ' << display_name(c) << " |";
  t << "\n|---|---|";
  for (std::size_t i = 0; i < classifiers.size(); ++i) t << "---|";
  t << '\n';

  for (const auto& e : extractors) {
    for (int fold = 0; fold <= k; ++fold) {
      const bool all = fold == k;
      std::vector<const double*> values;
      for (const auto& c : classifiers) {
        const auto it = cells.find({e, c});
        const EvalReport* r = it == cells.end() ? nullptr : it->second;
        if (!r || (!all && fold >= static_cast<int>(r->folds.size()))) {
          values.push_back(nullptr);
        } else {
          values.push_back(all ? &r->mean : &r->folds[static_cast<std::size_t>(fold)].accuracy);
        }
      }
      const int best = best_index(values);
      t << "| " << e << " | " << (all ? std::string("All Folds") : "Fold " + std::to_string(fold + 1))
        << " |";
      for (std::size_t i = 0; i < classifiers.size(); ++i) {
        if (!values[i]) {
          t << " - |";
          continue;
        }
        const EvalReport* r = cells.at({e, classifiers[i]});
        t << ' ' << format_percent(*values[i]);
        if (all) t << " ± " << format_percent(r->std);
        if (static_cast<int>(i) == best) t << '*';
        t << " |";
      }
      t << '\n';
    }
  }
  for (const auto& a : absent) {
    t << "| " << a << " | absent |";
    for (std::size_t i = 0; i < classifiers.size(); ++i) t << " - |";
    t << '\n';
  }

  struct Best {
    std::string extractor;
    std::size_t dim;
    double accuracy;
    std::string classifier;
  };
  std::vector<Best> best;
  for (const auto& e : extractors) {
    Best b{e, dims[e], -1.0, ""};
    for (const auto& c : classifiers) {
      const auto it = cells.find({e, c});
      if (it != cells.end() && it->second->mean > b.accuracy) {
        b.accuracy = it->second->mean;
        b.classifier = c;
      }
    }
    best.push_back(b);
  }
  std::stable_sort(best.begin(), best.end(),
                   [](const Best& a, const Best& b) { return a.accuracy > b.accuracy; });

  t << "\n| Features | Feature Size | Best Accuracy | Best Classifier |\n|---|---|---|---|\n";
  for (const auto& b : best) {
    t << "| " << b.extractor << " | " << b.dim << " | " << format_percent(b.accuracy) << " | "
      << display_name(b.classifier) << " |\n";
  }
  doc.table = t.str();
  return doc;
}

void write_report(const std::filesystem::path& dir, const ResultsDocument& doc) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "results.csv", doc.results_csv);
  write_text(dir / "summary.csv", doc.summary_csv);
  write_text(dir / "table.md", doc.table);
}

std::string curve_csv(const LearningCurve& curve) {
  std::ostringstream os;
  os << kCurveHeader << '\n';
  for (std::size_t i = 0; i < curve.fractions.size(); ++i) {
    char frac[32];
    std::snprintf(frac, sizeof frac, "%g", curve.fractions[i]);
    os << frac << ',' << curve.train_sizes[i] << ',' << format_percent(curve.train_mean[i]) << ','
       << format_percent(curve.train_std[i]) << ',' << format_percent(curve.test_mean[i]) << ','
       << format_percent(curve.test_std[i]) << '\n';
  }
  return os.str();
}

}  // namespace texbench
