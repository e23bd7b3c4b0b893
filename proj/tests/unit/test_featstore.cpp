#include <cmath>
#include <cstdlib>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "suites.hpp"
#include "tempdir.hpp"
#include "texbench/errors.hpp"
#include "texbench/featstore.hpp"

using namespace texbench;

namespace {

FeatureMatrix two_rows() {
  FeatureMatrix m;
  m.values = Matrix::from_rows({{1.5, -2.0, 0.1}, {3.0, 1e-300, 12345678.9}});
  m.labels = {"A", "B"};
  m.meta = {"lbp", "points=14;radius=4", "00ff"};
  return m;
}

std::size_t error_line(const std::string& text) {
  try {
    parse_features(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

// Independent statement of the file grammar, used to judge mutated files.
bool grammatical(const std::string& text) {
  static const std::regex number(R"(-?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) return false;
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 4) return false;
  for (const auto& l : lines) {
    if (l.find('\r') != std::string::npos) return false;
  }
  if (lines[0].rfind("# extractor=", 0) != 0 || lines[1].rfind("# params=", 0) != 0) return false;
  std::smatch m;
  if (!std::regex_match(lines[2], m, std::regex(R"(# dim=([1-9]\d{0,6}))"))) return false;
  const std::size_t d = std::stoul(m[1]);
  std::string header = "label";
  for (std::size_t j = 0; j < d; ++j) header += ",f" + std::to_string(j);
  if (lines[3] != header) return false;
  for (std::size_t i = 4; i < lines.size(); ++i) {
    std::vector<std::string> fields;
    std::stringstream ss(lines[i]);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!lines[i].empty() && lines[i].back() == ',') fields.push_back("");
    if (fields.size() != d + 1 || fields[0].empty()) return false;
    for (std::size_t j = 1; j <= d; ++j) {
      if (!std::regex_match(fields[j], number)) return false;
      if (!std::isfinite(std::strtod(fields[j].c_str(), nullptr))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("exact layout of a 1x1 file") {
  FeatureMatrix m;
  m.values = Matrix::from_rows({{0.0}});
  m.labels = {"a"};
  m.meta = {"lbp", "points=14;radius=4", ""};
  CHECK(format_features(m) == "# extractor=lbp\n# params=points=14;radius=4\n# dim=1\nlabel,f0\na,0\n");
}

TEST_CASE("fingerprint is carried on the params line") {
  const auto text = format_features(two_rows());
  CHECK(text.rfind("# extractor=lbp\n# params=points=14;radius=4;dataset=00ff\n# dim=3\n", 0) == 0);
  const auto back = parse_features(text);
  CHECK(back.meta.params == "points=14;radius=4");
  CHECK(back.meta.fingerprint == "00ff");

  FeatureMatrix bare = two_rows();
  bare.meta.params = "";
  const auto b = parse_features(format_features(bare));
  CHECK(b.meta.params.empty());
  CHECK(b.meta.fingerprint == "00ff");
}

TEST_CASE("file round trip") {
  oracle::TempDir dir;
  const auto m = two_rows();
  write_features(dir / "f.csv", m);
  const auto back = read_features(dir / "f.csv");
  CHECK(back == m);
  CHECK(back.values(1, 1) == 1e-300);
  CHECK_THROWS_AS(read_features(dir / "missing.csv"), IoError);
  CHECK_THROWS_AS(write_features(dir / "no" / "such" / "dir.csv", m), IoError);
}

TEST_CASE("random matrices round-trip bit-exactly") {
  const auto r = oracle::featstore_suite(100);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("subnormal values survive a round trip") {
  FeatureMatrix m;
  m.values = Matrix::from_rows({{5e-324, -2.2250738585072009e-308, 1.7976931348623157e308}});
  m.labels = {"x"};
  const auto back = parse_features(format_features(m));
  CHECK(back.values == m.values);
}

TEST_CASE("malformed files report the offending line") {
  const std::string head = "# extractor=lbp\n# params=p\n# dim=2\nlabel,f0,f1\n";
  CHECK(parse_features(head + "a,1,2\nb,3,4\n").size() == 2);
  CHECK(error_line(head + "a,1,2\nb,3\n") == 6);
  CHECK(error_line(head + "a,1,2,3\n") == 5);
  CHECK(error_line(head + "a,1,nan\n") == 5);
  CHECK(error_line(head + "a,1,NaN\n") == 5);
  CHECK(error_line(head + "a,inf,2\n") == 5);
  CHECK(error_line(head + "a,1e999,2\n") == 5);
  CHECK(error_line(head + "a,,2\n") == 5);
  CHECK(error_line(head + "a,1,2,\n") == 5);
  CHECK(error_line(head + ",1,2\n") == 5);
  CHECK(error_line(head + "a,1,2") == 5);
  CHECK(error_line(head + "a,1,2\r\n") == 5);
  CHECK(error_line(head + "a,+1,2\n") == 5);
  CHECK(error_line(head + "a, 1,2\n") == 5);
  CHECK(error_line("# extractor=lbp\n# params=p\n# dim=3\nlabel,f0,f1\n") == 4);
  CHECK(error_line("# extractor=lbp\n# params=p\n# dim=02\nlabel,f0,f1\n") == 3);
  CHECK(error_line("# extractor=lbp\n# params=p\n# dim=0\nlabel\n") == 3);
  CHECK(error_line("# extractor=lbp\n# dim=2\n") == 2);
  CHECK(error_line("") == 1);
  try {
    parse_features(head + "a,1\n", "feats.csv");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("feats.csv:5:", 0) == 0);
  }
}

TEST_CASE("writer refuses matrices it cannot represent") {
  auto m = two_rows();
  m.values(0, 0) = std::nan("");
  CHECK_THROWS_AS(format_features(m), ParameterError);
  m = two_rows();
  m.labels[0] = "a,b";
  CHECK_THROWS_AS(format_features(m), ParameterError);
  m = two_rows();
  m.labels.pop_back();
  CHECK_THROWS_AS(format_features(m), ParameterError);
  m = two_rows();
  m.meta.params = "x=1;dataset=abc";
  CHECK_THROWS_AS(format_features(m), ParameterError);
}

TEST_CASE("reader accepts exactly the grammatical mutations of a valid file") {
  std::mt19937_64 rng(21);
  const std::string base = format_features(two_rows());
  const std::string alphabet = ",.-+e0123456789\n\r#aN ";
  int accepted = 0, rejected = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::string t = base;
    const int edits = 1 + static_cast<int>(rng() % 3);
    for (int e = 0; e < edits && !t.empty(); ++e) {
      const auto at = static_cast<std::size_t>(rng() % t.size());
      const char c = alphabet[rng() % alphabet.size()];
      switch (rng() % 3) {
        case 0: t.erase(at, 1); break;
        case 1: t.insert(t.begin() + static_cast<std::ptrdiff_t>(at), c); break;
        default: t[at] = c;
      }
    }
    bool parsed = true;
    try {
      parse_features(t);
    } catch (const ParseError&) {
      parsed = false;
    }
    const bool expected = grammatical(t);
    INFO("mutated text:\n" << t);
    REQUIRE(parsed == expected);
    (parsed ? accepted : rejected)++;
  }
  CHECK(accepted > 50);
  CHECK(rejected > 50);
}

TEST_CASE("label encoding is sorted by name") {
  const std::vector<std::string> labels = {"b", "a", "c", "a"};
  const auto enc = encode_labels(labels);
  CHECK(enc.names == std::vector<std::string>{"a", "b", "c"});
  CHECK(enc.ids == std::vector<int>{1, 0, 2, 0});
}
