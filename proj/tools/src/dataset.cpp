#include "pmedian_cli/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "pmedian/error.hpp"

namespace pmedian::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct ParsedFactor {
  Factor factor;
  FactorPoint point;
};

std::vector<double> numbers(const json& value, int line, const char* what) {
  if (!value.is_array() || value.empty()) throw DatasetError(line, std::string(what) + " value must be a nonempty array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) throw DatasetError(line, std::string(what) + " value contains a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

ParsedFactor parse_factor(const json& obj, int line) {
  if (!obj.is_object() || !obj.contains("type") || !obj.contains("value")) {
    throw DatasetError(line, "factor object needs \"type\" and \"value\"");
  }
  const auto& type = obj.at("type");
  if (!type.is_string()) throw DatasetError(line, "factor type must be a string");
  const std::string name = type.get<std::string>();
  const auto& value = obj.at("value");

  if (name == "euclidean" || name == "sphere") {
    const auto v = numbers(value, line, name.c_str());
    Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    const int dim = static_cast<int>(v.size());
    if (name == "sphere" && dim < 2) throw DatasetError(line, "sphere points need at least 2 coordinates");
    return {name == "euclidean" ? Factor::euclidean(dim) : Factor::sphere(dim), FactorPoint(std::move(vec))};
  }
  if (name == "positive") {
    if (!value.is_number()) throw DatasetError(line, "positive value must be a number");
    return {Factor::positive_half_line(), FactorPoint(value.get<double>())};
  }
  if (name == "spd_bw") {
    const auto v = numbers(value, line, name.c_str());
    const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (dim * dim != static_cast<int>(v.size())) throw DatasetError(line, "spd_bw value must hold d*d entries");
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m(r, c) = v[static_cast<size_t>(r * dim + c)];
    }
    if (!m.isApprox(m.transpose(), 1e-12)) throw DatasetError(line, "spd_bw matrix is not symmetric");
    try {
      return {Factor::spd_bures_wasserstein(dim), FactorPoint(SpdMatrix(m))};
    } catch (const Error& e) {
      throw DatasetError(line, e.what());
    }
  }
  throw DatasetError(line, "unknown factor type \"" + name + "\"");
}

}  // namespace

WeightedSample read_dataset(std::istream& in) {
  std::vector<Factor> signature;
  std::vector<ProductPoint> points;
  std::vector<double> weights;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DatasetError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object() || !record.contains("factors") || !record.at("factors").is_array()) {
      throw DatasetError(line, "record needs a \"factors\" array");
    }
    double weight = 1.0;
    if (record.contains("weight")) {
      if (!record.at("weight").is_number()) throw DatasetError(line, "weight must be a number");
      weight = record.at("weight").get<double>();
    }
    if (!(weight > 0.0) || !std::isfinite(weight)) throw DatasetError(line, "weight must be positive and finite");

    ProductPoint point;
    std::vector<Factor> factors;
    for (const auto& f : record.at("factors")) {
      auto parsed = parse_factor(f, line);
      factors.push_back(parsed.factor);
      point.components.push_back(std::move(parsed.point));
    }
    if (factors.empty()) throw DatasetError(line, "record has no factors");
    if (signature.empty()) {
      signature = factors;
    } else if (factors != signature) {
      throw DatasetError(line, "factor signature differs from the first record");
    }
    try {
      ProductManifold(factors).check_point(point);
    } catch (const Error& e) {
      throw DatasetError(line, e.what());
    }
    points.push_back(std::move(point));
    weights.push_back(weight);
  }
  if (points.empty()) throw DatasetError(0, "dataset is empty");
  return WeightedSample::from_unnormalized(ProductManifold(signature), std::move(points), std::move(weights));
}

WeightedSample read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(0, "cannot open dataset " + path);
  return read_dataset(in);
}

json point_to_json(const ProductManifold& pm, const ProductPoint& p, double weight) {
  json factors = json::array();
  for (int j = 0; j < pm.size(); ++j) {
    const auto& c = p.components[static_cast<size_t>(j)];
    json value;
    switch (pm.factor(j).kind()) {
      case FactorKind::Euclidean:
      case FactorKind::Sphere: {
        value = json::array();
        for (Eigen::Index k = 0; k < c.vector().size(); ++k) value.push_back(c.vector()(k));
        break;
      }
      case FactorKind::PositiveHalfLine:
        value = c.scalar();
        break;
      case FactorKind::SpdBuresWasserstein: {
        value = json::array();
        const auto& m = c.spd().matrix();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          for (Eigen::Index k = 0; k < m.cols(); ++k) value.push_back(m(r, k));
        }
        break;
      }
    }
    factors.push_back({{"type", to_string(pm.factor(j).kind())}, {"value", value}});
  }
  return {{"weight", weight}, {"factors", factors}};
}

void write_dataset(std::ostream& out, const WeightedSample& sample) {
  for (int i = 0; i < sample.size(); ++i) {
    out << point_to_json(sample.manifold(), sample.point(i), sample.weight(i)).dump() << '\n';
  }
}

}  // namespace pmedian::cli
