#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "texbench/eval.hpp"

namespace texbench {

struct ResultsDocument {
  std::string results_csv;  // one record per (extractor, classifier, fold)
  std::string summary_csv;  // one record per (extractor, classifier)
  std::string table;        // human-readable grid plus best-of summary
};

inline constexpr const char* kResultsHeader =
    "extractor,extractor_params,classifier,classifier_params,fold,accuracy,n_train,n_test,seed,"
    "wall_ms";
inline constexpr const char* kSummaryHeader =
    "extractor,extractor_params,classifier,classifier_params,dim,k,mean,std,min,max,seed";
inline constexpr const char* kCurveHeader =
    "fraction,train_size,train_mean,train_std,test_mean,test_std";

// Rows follow the first appearance of each extractor; the best cell of each row
// is marked with '*'. Extractors listed in `absent` get a placeholder row.
ResultsDocument render_report(std::span<const EvalReport> reports,
                              std::span<const std::string> absent = {});

void write_report(const std::filesystem::path& dir, const ResultsDocument& doc);

std::string curve_csv(const LearningCurve& curve);

// Fixed two-decimal rendering used in every report.
std::string format_percent(double value);

// RFC 4180 quoting when needed.
std::string csv_field(const std::string& value);

}  // namespace texbench
