#include "gcnal/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw Error(where + ": cannot parse '" + t + "' as a number");
  }
  return v;
}

long long parse_integer(std::string_view s, const std::string& where) {
  const std::string t = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(where + ": cannot parse '" + t + "' as an integer");
  }
  return v;
}

std::size_t parse_count(std::string_view s, const std::string& where) {
  const long long v = parse_integer(s, where);
  if (v < 0) throw Error(where + ": expected a non-negative count");
  return static_cast<std::size_t>(v);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Row order within the train and test parts is shuffled by `rng`.
DatasetSplit split_rows(const Dataset& data, const std::vector<std::size_t>& test_rows,
                        Rng& rng) {
  std::vector<bool> is_test(data.size(), false);
  for (std::size_t r : test_rows) is_test[r] = true;
  std::vector<std::size_t> train, test;
  for (std::size_t r = 0; r < data.size(); ++r) (is_test[r] ? test : train).push_back(r);
  rng.shuffle(train);
  rng.shuffle(test);
  return {data.subset(train), data.subset(test)};
}

std::size_t test_count(std::size_t n) {
  return static_cast<std::size_t>(std::llround(kTestFraction * static_cast<double>(n)));
}

}  // namespace

BlobSpec BlobSpec::balanced(std::size_t classes, std::size_t per_class, std::size_t dim,
                            double spread, double noise) {
  BlobSpec s;
  s.dim = dim;
  s.spread = spread;
  s.noise = noise;
  s.class_counts.assign(classes, per_class);
  return s;
}

BlobSpec BlobSpec::imbalanced(std::size_t classes, std::size_t per_class,
                              std::size_t reduced_classes, double fraction, std::size_t dim,
                              double spread, double noise) {
  if (reduced_classes > classes) throw Error("more reduced classes than classes");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("reduced fraction must lie in (0, 1]");
  BlobSpec s = balanced(classes, per_class, dim, spread, noise);
  const auto reduced =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(per_class)));
  for (std::size_t c = classes - reduced_classes; c < classes; ++c) s.class_counts[c] = reduced;
  return s;
}

std::size_t BlobSpec::total() const noexcept {
  return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
}

void BlobSpec::validate() const {
  if (class_counts.size() < 2) throw Error("blobs need at least two classes");
  if (dim == 0) throw Error("blob dimension must be positive");
  if (!(spread >= 0.0) || !(noise >= 0.0)) throw Error("blob spread and noise must be >= 0");
  for (std::size_t c : class_counts)
    if (c == 0) throw Error("every blob class needs at least one sample");
}

void RegressionSpec::validate() const {
  if (samples < 2 || dim == 0 || outputs == 0) {
    throw Error("regression needs samples >= 2 and positive dim and outputs");
  }
  if (!(noise >= 0.0)) throw Error("regression noise must be >= 0");
}

DatasetSplit generate_blobs(const BlobSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t classes = spec.classes();
  Matrix centres(classes, spec.dim);
  for (double& x : centres.values()) x = rng.normal(0.0, spec.spread);

  Matrix inputs(spec.total(), spec.dim);
  std::vector<int> labels;
  labels.reserve(spec.total());
  std::vector<std::size_t> test_rows;
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t n = spec.class_counts[c];
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), row);
    for (std::size_t i = 0; i < n; ++i, ++row) {
      for (std::size_t k = 0; k < spec.dim; ++k)
        inputs(row, k) = centres(c, k) + (spec.noise > 0.0 ? rng.normal(0.0, spec.noise) : 0.0);
      labels.push_back(static_cast<int>(c));
    }
    rng.shuffle(rows);
    rows.resize(test_count(n));
    test_rows.insert(test_rows.end(), rows.begin(), rows.end());
  }
  const Dataset all =
      Dataset::classification(std::move(inputs), std::move(labels), static_cast<int>(classes));
  return split_rows(all, test_rows, rng);
}

DatasetSplit generate_regression(const RegressionSpec& spec, Rng& rng) {
  spec.validate();
  Matrix weights(spec.dim, spec.outputs);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
  for (double& w : weights.values()) w = rng.normal(0.0, scale);
  Matrix inputs(spec.samples, spec.dim);
  for (double& x : inputs.values()) x = rng.normal();
  Matrix targets = matmul(inputs, weights);
  if (spec.noise > 0.0)
    for (double& y : targets.values()) y += rng.normal(0.0, spec.noise);
  const Dataset all = Dataset::regression(std::move(inputs), std::move(targets));
  return split_dataset(all, rng);
}

DatasetSplit split_dataset(const Dataset& data, Rng& rng) {
  std::vector<std::size_t> test_rows;
  if (data.task == TaskKind::kClassification) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < data.size(); ++r) by_class[data.labels[r]].push_back(r);
    for (auto& [label, rows] : by_class) {
      rng.shuffle(rows);
      rows.resize(test_count(rows.size()));
      test_rows.insert(test_rows.end(), rows.begin(), rows.end());
    }
  } else {
    test_rows = rng.sample_without_replacement(data.size(), test_count(data.size()));
  }
  if (test_rows.empty() || test_rows.size() == data.size()) {
    throw Error("dataset of " + std::to_string(data.size()) + " rows is too small to split");
  }
  return split_rows(data, test_rows, rng);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  const std::string name = path.string();

  std::string line;
  if (!std::getline(in, line)) throw Error(name + ":1: missing header row");
  const auto header = split(trim(line), ',');
  std::size_t features = 0;
  while (features < header.size() && trim(header[features]) == "feat_" + std::to_string(features))
    ++features;
  if (features == 0) throw Error(name + ":1: header must start with feat_0");
  const std::size_t rest = header.size() - features;
  bool classification = false;
  if (rest == 1 && trim(header[features]) == "label") {
    classification = true;
  } else if (rest == 1 && trim(header[features]) == "target") {
  } else {
    for (std::size_t j = 0; j < rest; ++j) {
      if (trim(header[features + j]) != "target_" + std::to_string(j)) {
        throw Error(name + ":1: unexpected column '" + trim(header[features + j]) + "'");
      }
    }
    if (rest == 0) throw Error(name + ":1: missing label or target columns");
  }

  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> labels;
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw Error(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                  std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < features; ++k) x.push_back(parse_double(cells[k], where));
    if (classification) {
      const long long label = parse_integer(cells[features], where);
      if (label < 0 || label > std::numeric_limits<int>::max()) {
        throw Error(where + ": label " + std::to_string(label) + " is out of range");
      }
      labels.push_back(static_cast<int>(label));
    } else {
      for (std::size_t j = 0; j < rest; ++j) y.push_back(parse_double(cells[features + j], where));
    }
    ++rows;
  }
  if (rows == 0) throw Error(name + ": no data rows");
  Matrix inputs(rows, features, std::move(x));
  if (classification) return Dataset::classification(std::move(inputs), std::move(labels));
  return Dataset::regression(std::move(inputs), Matrix(rows, rest, std::move(y)));
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write dataset file " + path.string());
  for (std::size_t k = 0; k < data.input_width(); ++k) out << (k ? "," : "") << "feat_" << k;
  if (data.task == TaskKind::kClassification) {
    out << ",label\n";
  } else {
    for (std::size_t j = 0; j < data.targets.cols(); ++j) out << ",target_" << j;
    out << '\n';
  }
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t k = 0; k < data.input_width(); ++k)
      out << (k ? "," : "") << format_double(data.inputs(r, k));
    if (data.task == TaskKind::kClassification) {
      out << ',' << data.labels[r];
    } else {
      for (std::size_t j = 0; j < data.targets.cols(); ++j)
        out << ',' << format_double(data.targets(r, j));
    }
    out << '\n';
  }
  if (!out) throw Error("failed while writing " + path.string());
}

DatasetSource DatasetSource::parse(std::string_view text) {
  const std::string spec = trim(text);
  const auto colon = spec.find(':');
  const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  const std::string where = "dataset '" + spec + "'";

  DatasetSource src;
  if (kind == "csv") {
    src.kind = Kind::kCsv;
    const auto paths = split(args, ',');
    if (paths.size() > 2 || trim(paths[0]).empty()) throw Error(where + ": expected csv:<train>[,<test>]");
    src.train_path = trim(paths[0]);
    if (paths.size() == 2) src.test_path = trim(paths[1]);
    return src;
  }

  std::map<std::string, std::string> kv;
  if (!args.empty()) {
    for (const auto& item : split(args, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(where + ": expected key=value, got '" + item + "'");
      if (!kv.emplace(trim(item.substr(0, eq)), trim(item.substr(eq + 1))).second) {
        throw Error(where + ": duplicate parameter '" + trim(item.substr(0, eq)) + "'");
      }
    }
  }
  auto take = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto count = [&](const std::string& key, std::size_t fallback) {
    const auto* v = take(key);
    return v ? parse_count(*v, where + " " + key) : fallback;
  };
  auto real = [&](const std::string& key, double fallback) {
    const auto* v = take(key);
    return v ? parse_double(*v, where + " " + key) : fallback;
  };
  auto reject_unknown = [&](std::initializer_list<const char*> known) {
    for (const auto& [key, value] : kv) {
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
        throw Error(where + ": unknown parameter '" + key + "'");
      }
    }
  };

  if (kind == "blobs") {
    reject_unknown({"classes", "per_class", "dim", "spread", "noise", "reduced_classes",
                    "reduced_fraction"});
    src.kind = Kind::kBlobs;
    src.blobs = BlobSpec::imbalanced(count("classes", 10), count("per_class", 250),
                                     count("reduced_classes", 0), real("reduced_fraction", 0.1),
                                     count("dim", 32), real("spread", 1.0), real("noise", 1.0));
    src.blobs.validate();
    return src;
  }
  if (kind == "regression") {
    reject_unknown({"samples", "dim", "outputs", "noise"});
    src.kind = Kind::kRegression;
    src.regression.samples = count("samples", 2500);
    src.regression.dim = count("dim", 8);
    src.regression.outputs = count("outputs", 4);
    src.regression.noise = real("noise", 0.1);
    src.regression.validate();
    return src;
  }
  throw Error(where + ": unknown generator '" + kind + "' (expected blobs, regression or csv)");
}

DatasetSplit DatasetSource::materialize(Rng& rng) const {
  switch (kind) {
    case Kind::kBlobs: return generate_blobs(blobs, rng);
    case Kind::kRegression: return generate_regression(regression, rng);
    case Kind::kCsv: break;
  }
  Dataset train = load_dataset(train_path);
  if (test_path.empty()) return split_dataset(train, rng);
  Dataset test = load_dataset(test_path);
  if (test.task != train.task || test.input_width() != train.input_width() ||
      (train.task == TaskKind::kRegression && test.output_width() != train.output_width())) {
    throw Error("train and test files disagree on schema");
  }
  if (train.task == TaskKind::kClassification) {
    const int classes = std::max(train.num_classes, test.num_classes);
    train.num_classes = classes;
    test.num_classes = classes;
  }
  return {std::move(train), std::move(test)};
}

}  // namespace gcnal
