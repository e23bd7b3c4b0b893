#include "texbench/featstore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "texbench/errors.hpp"

namespace texbench {
namespace {

constexpr std::string_view kFingerprintKey = "dataset=";

bool has_line_break(std::string_view s) {
  return s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::string_view trailing_token(std::string_view params) {
  const auto pos = params.rfind(';');
  return pos == std::string_view::npos ? params : params.substr(pos + 1);
}

// Sequential reader over LF-terminated lines.
class LineReader {
 public:
  LineReader(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t line_no() const { return line_; }

  std::string_view next() {
    if (at_end()) fail("unexpected end of file");
    ++line_;
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) fail("line is not terminated by LF");
    std::string_view line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    if (line.find('\r') != std::string_view::npos) fail("carriage return in line");
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_, std::max<std::size_t>(line_, 1), what);
  }

 private:
  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

// from_chars grammar. libstdc++ reports subnormal results as out of range, so
// those are re-read with strtod; overflow stays an error.
bool parse_number(std::string_view tok, double& v) {
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ptr != tok.data() + tok.size()) return false;
  if (res.ec == std::errc()) return true;
  if (res.ec != std::errc::result_out_of_range) return false;
  const std::string copy(tok);
  v = std::strtod(copy.c_str(), nullptr);
  return std::isfinite(v) && std::abs(v) < 1.0;
}

std::string_view expect_prefix(LineReader& in, std::string_view line, std::string_view prefix) {
  if (line.substr(0, prefix.size()) != prefix) {
    in.fail("expected line starting with '" + std::string(prefix) + "'");
  }
  return line.substr(prefix.size());
}

}  // namespace

void FeatureMatrix::validate() const {
  if (values.cols() == 0) throw ParameterError("feature matrix must have at least one column");
  if (labels.size() != values.rows()) {
    throw ParameterError("feature matrix has " + std::to_string(values.rows()) + " rows but " +
                         std::to_string(labels.size()) + " labels");
  }
  if (!values.all_finite()) throw ParameterError("feature matrix contains non-finite values");
  for (const auto& l : labels) {
    if (l.empty() || l.find(',') != std::string::npos || has_line_break(l)) {
      throw ParameterError("invalid feature label '" + l + "'");
    }
  }
  if (has_line_break(meta.extractor) || has_line_break(meta.params) ||
      has_line_break(meta.fingerprint)) {
    throw ParameterError("feature metadata may not contain line breaks");
  }
  if (trailing_token(meta.params).starts_with(kFingerprintKey)) {
    throw ParameterError("params may not end with a 'dataset=' entry; use meta.fingerprint");
  }
  if (meta.fingerprint.find(';') != std::string::npos) {
    throw ParameterError("fingerprint may not contain ';'");
  }
}

std::string format_features(const FeatureMatrix& m) {
  m.validate();
  const std::size_t d = m.dim();
  std::string out;
  out.reserve(64 + m.size() * d * 12);
  out += "# extractor=" + m.meta.extractor + "\n";
  out += "# params=" + m.meta.params;
  if (!m.meta.fingerprint.empty()) {
    if (!m.meta.params.empty()) out += ';';
    out += kFingerprintKey;
    out += m.meta.fingerprint;
  }
  out += "\n# dim=" + std::to_string(d) + "\nlabel";
  for (std::size_t j = 0; j < d; ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.labels[i];
    for (double v : m.values.row(i)) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_features(const std::filesystem::path& path, const FeatureMatrix& matrix) {
  const std::string text = format_features(matrix);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

FeatureMatrix parse_features(std::string_view text, const std::string& source) {
  LineReader in(text, source);
  FeatureMatrix m;

  m.meta.extractor = std::string(expect_prefix(in, in.next(), "# extractor="));
  std::string_view params = expect_prefix(in, in.next(), "# params=");
  if (const auto last = trailing_token(params); last.starts_with(kFingerprintKey)) {
    m.meta.fingerprint = std::string(last.substr(kFingerprintKey.size()));
    params = last.size() == params.size() ? std::string_view{}
                                          : params.substr(0, params.size() - last.size() - 1);
  }
  m.meta.params = std::string(params);

  const std::string_view dim_text = expect_prefix(in, in.next(), "# dim=");
  std::size_t d = 0;
  {
    const auto* first = dim_text.data();
    const auto* last = first + dim_text.size();
    const auto res = std::from_chars(first, last, d);
    if (res.ec != std::errc() || res.ptr != last || d == 0 || dim_text[0] == '0') {
      in.fail("invalid dimension '" + std::string(dim_text) + "'");
    }
  }

  {
    std::string header = "label";
    for (std::size_t j = 0; j < d; ++j) header += ",f" + std::to_string(j);
    if (in.next() != header) in.fail("header does not match dim=" + std::to_string(d));
  }

  m.values = Matrix(0, d);
  std::vector<double> row(d);
  while (!in.at_end()) {
    const std::string_view line = in.next();
    auto comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0) in.fail("missing label or values");
    m.labels.emplace_back(line.substr(0, comma));
    std::size_t pos = comma + 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (pos > line.size()) {
        in.fail("expected " + std::to_string(d) + " values, found " + std::to_string(j));
      }
      auto end = line.find(',', pos);
      if (end == std::string_view::npos) end = line.size();
      if (j + 1 < d && end == line.size()) {
        in.fail("expected " + std::to_string(d) + " values, found " + std::to_string(j + 1));
      }
      const std::string_view tok = line.substr(pos, end - pos);
      double v = 0.0;
      if (!parse_number(tok, v)) {
        in.fail("invalid number '" + std::string(tok) + "' in column " + std::to_string(j));
      }
      if (!std::isfinite(v)) in.fail("non-finite value in column " + std::to_string(j));
      row[j] = v;
      pos = end + 1;
    }
    if (pos <= line.size()) in.fail("more than " + std::to_string(d) + " values");
    m.values.push_row(row);
  }
  return m;
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open feature file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_features(ss.str(), path.string());
}

EncodedLabels encode_labels(std::span<const std::string> labels) {
  EncodedLabels out;
  std::map<std::string, int> ids;
  for (const auto& l : labels) ids.emplace(l, 0);
  for (auto& [name, id] : ids) {
    id = static_cast<int>(out.names.size());
    out.names.push_back(name);
  }
  out.ids.reserve(labels.size());
  for (const auto& l : labels) out.ids.push_back(ids.at(l));
  return out;
}

}  // namespace texbench
