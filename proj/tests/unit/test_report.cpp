#include <sstream>

#include "doctest.h"
#include "tempdir.hpp"
#include "texbench/report.hpp"

using namespace texbench;

namespace {

EvalReport fake(const std::string& extractor, const std::string& clf, std::size_t dim,
                std::vector<double> acc) {
  EvalReport r;
  r.info.extractor = extractor;
  r.info.extractor_params = "p=1";
  r.info.classifier = clf;
  r.info.classifier_params = "c=2";
  r.info.dim = dim;
  r.k = static_cast<int>(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    FoldResult f;
    f.fold = static_cast<int>(i);
    f.accuracy = acc[i];
    f.n_train = 640;
    f.n_test = 320;
    r.folds.push_back(f);
  }
  r.mean = mean_of(acc);
  r.std = sample_std(acc);
  return r;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("formatting helpers") {
  CHECK(format_percent(90.5234) == "90.52");
  CHECK(format_percent(5) == "5.00");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("single report") {
  const EvalReport r[] = {fake("lbp", "svm", 1182, {91.56, 89.06, 90.94})};
  const auto doc = render_report(r);
  CHECK(count_lines(doc.results_csv) == 4);
  CHECK(doc.results_csv.rfind(std::string(kResultsHeader) + "\n", 0) == 0);
  CHECK(doc.results_csv.find("\nlbp,p=1,svm,c=2,1,91.56,640,320,42,") != std::string::npos);
  CHECK(count_lines(doc.summary_csv) == 2);
  CHECK(doc.summary_csv.find("lbp,p=1,svm,c=2,1182,3,90.52,1.30,89.06,91.56,42") != std::string::npos);
  CHECK(doc.table.find("| lbp | All Folds | 90.52 ± 1.30* |") != std::string::npos);
  CHECK(doc.table.find("| lbp | 1182 | 90.52 | SVM |") != std::string::npos);
}

TEST_CASE("full grid mirrors the 6 x 3 layout with a best-of summary") {
  const std::vector<std::pair<std::string, std::size_t>> sets = {
      {"lbp", 1182}, {"hog", 1224}, {"vgg19_fc1", 4096}, {"vgg19_block5_pool", 512},
      {"vgg19_block4_pool", 512}, {"vgg19_block3_pool", 256}};
  std::vector<EvalReport> reports;
  double base = 10.0;
  for (const auto& [name, dim] : sets) {
    reports.push_back(fake(name, "svm", dim, {base, base + 1, base + 2}));
    reports.push_back(fake(name, "tree", dim, {base + 5, base + 5, base + 5}));
    reports.push_back(fake(name, "mlp", dim, {base + 3, base + 3, base + 3}));
    base += 10.0;
  }
  const auto doc = render_report(reports);
  CHECK(count_lines(doc.summary_csv) == 19);
  CHECK(count_lines(doc.results_csv) == 1 + 18 * 3);
  CHECK(doc.table.find("| Features | Fold | SVM | DT | ANN |") != std::string::npos);
  for (const auto& [name, dim] : sets) {
    CHECK(doc.table.find("| " + name + " | All Folds |") != std::string::npos);
    CHECK(doc.table.find("| " + name + " | " + std::to_string(dim) + " | ") != std::string::npos);
  }
  // Best cell of the LBP fold-1 row is the tree column.
  CHECK(doc.table.find("| lbp | Fold 1 | 10.00 | 15.00* | 13.00 |") != std::string::npos);
  // Best-of summary is ordered by accuracy.
  CHECK(doc.table.find("| vgg19_block3_pool | 256 |") < doc.table.find("| lbp | 1182 |"));
}

TEST_CASE("absent feature sets get a placeholder row") {
  const EvalReport r[] = {fake("lbp", "svm", 1182, {90, 91, 92})};
  const std::string absent[] = {"vgg19_fc1"};
  const auto doc = render_report(r, absent);
  CHECK(doc.table.find("| vgg19_fc1 | absent | - |") != std::string::npos);
}

TEST_CASE("report files and curve CSV") {
  oracle::TempDir dir;
  const EvalReport r[] = {fake("hog", "tree", 1224, {13, 12, 14})};
  write_report(dir / "out", render_report(r));
  CHECK(std::filesystem::exists(dir / "out" / "results.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "table.md"));

  LearningCurve c;
  c.fractions = {0.5, 1.0};
  c.train_sizes = {320, 640};
  c.train_mean = {100, 99.5};
  c.train_std = {0, 0.25};
  c.test_mean = {80, 90.123};
  c.test_std = {1, 2};
  CHECK(curve_csv(c) == std::string(kCurveHeader) +
                            "\n0.5,320,100.00,0.00,80.00,1.00\n1,640,99.50,0.25,90.12,2.00\n");
}
