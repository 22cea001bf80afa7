#include "qht/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace qht {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, path + ": " + e.what());
  }
  return j;
}

}  // namespace

Matrix read_matrix_json(const std::string& path) {
  json j = load_json(path);
  if (!j.contains("dim") || !j.contains("matrix"))
    throw Error(ErrorKind::BadInput, path + ": expected fields \"dim\" and \"matrix\"");
  int d = j["dim"].get<int>();
  if (d <= 0) throw Error(ErrorKind::BadInput, path + ": nonpositive dimension");
  const json& rows = j["matrix"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != d)
    throw Error(ErrorKind::BadInput, path + ": matrix row count differs from dim");
  Matrix m(d);
  for (int i = 0; i < d; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw Error(ErrorKind::BadInput, path + ": matrix column count differs from dim");
    for (int k = 0; k < d; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2)
        throw Error(ErrorKind::BadInput, path + ": entries must be [re, im] pairs");
      m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

DensityMatrix read_state(const std::string& path, bool require_full_rank) {
  return validate_state(read_matrix_json(path), require_full_rank);
}

ClassicalDistribution read_distribution(const std::string& path, bool require_full_support) {
  json j = load_json(path);
  if (!j.contains("probs") || !j["probs"].is_array())
    throw Error(ErrorKind::BadInput, path + ": expected field \"probs\"");
  ClassicalDistribution p;
  for (const json& e : j["probs"]) p.probs.push_back(e.get<double>());
  p.validate(require_full_support);
  return p;
}

DensityMatrix read_state_or_distribution(const std::string& path, bool require_full_rank) {
  json j = load_json(path);
  if (j.contains("probs")) {
    ClassicalDistribution p = read_distribution(path, require_full_rank);
    return validate_state(Matrix::diag(p.probs), require_full_rank);
  }
  return read_state(path, require_full_rank);
}

std::string format_seventeen(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_state(const std::string& path, const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.dim(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(row);
  }
  json j{{"dim", m.dim()}, {"matrix", rows}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadInput, "cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_distribution(const std::string& path, const ClassicalDistribution& p) {
  json j{{"probs", p.probs}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadInput, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace qht
