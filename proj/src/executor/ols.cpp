/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/executor/ols.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gyp/common/error.hpp"

namespace gyp {

using nlohmann::json;

double LinearModel::predict(const std::vector<double>& x) const {
  double y = intercept;
  for (std::size_t i = 0; i < coefficients.size(); ++i) y += coefficients[i] * x[i];
  return y;
}

json model_to_json(const LinearModel& m) {
  return {{"gid", m.gid.str()},
          {"kind", "least-squares-linear"},
          {"features", m.features},
          {"target", m.target},
          {"coefficients", m.coefficients},
          {"intercept", m.intercept},
          {"training_metrics", {{"rmse", m.rmse}, {"n_rows", m.n_rows}}}};
}

LinearModel model_from_json(const json& j) {
  LinearModel m;
  try {
    m.gid = Gid::from_string(j.at("gid").get<std::string>());
    m.features = j.at("features").get<std::vector<std::string>>();
    m.target = j.at("target").get<std::string>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.rmse = j.at("training_metrics").at("rmse").get<double>();
    m.n_rows = j.at("training_metrics").at("n_rows").get<std::int64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("model: ") + e.what());
  }
  if (m.coefficients.size() != m.features.size()) {
    fail(ErrorCode::MalformedJson, "model: coefficient count differs from feature count");
  }
  return m;
}

void write_model(const std::filesystem::path& path, const LinearModel& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::CatalogIo, "cannot write " + path.string());
  out << model_to_json(m).dump(2) << "\n";
}

LinearModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingInput, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::MalformedJson, path.string());
  return model_from_json(j);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

// Design matrix: columns are features then target, rows in sorted order.
std::vector<std::vector<double>> numeric_columns(const Table& table, const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto i = table.schema.index_of(n);
    if (!i) fail(ErrorCode::UnknownColumn, n);
    if (!is_numeric(table.schema[*i].type)) fail(ErrorCode::TypeError, "column '" + n + "' is not numeric");
    idx.push_back(*i);
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    std::vector<double> x;
    x.reserve(idx.size());
    for (std::size_t i : idx) x.push_back(as_double(r[i]));
    rows.push_back(std::move(x));
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::vector<double>> cols(names.size(), std::vector<double>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) cols[c][r] = rows[r][c];
  }
  return cols;
}

double mean_of(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size()) / v.size(); }

}  // namespace

LinearModel fit_ols(const Table& table, const std::vector<std::string>& features, const std::string& target,
                    OlsOptions options) {
  std::vector<std::string> names = features;
  names.push_back(target);
  auto cols = numeric_columns(table, names);
  std::size_t n = table.rows.size();
  std::size_t k = features.size();

  LinearModel m;
  m.features = features;
  m.target = target;
  m.n_rows = static_cast<std::int64_t>(n);
  m.coefficients.assign(k, 0.0);
  if (n == 0) return m;

  std::vector<double> mean(k + 1);
  for (std::size_t c = 0; c <= k; ++c) mean[c] = mean_of(cols[c]);
  for (std::size_t c = 0; c <= k; ++c) {
    for (double& v : cols[c]) v -= mean[c];
  }

  Eigen::MatrixXd xtx(k, k);
  Eigen::VectorXd xty(k);
  std::vector<double> prod(n);
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t r = 0; r < n; ++r) prod[r] = a[r] * b[r];
    return pairwise_sum(prod.data(), n);
  };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) xtx(i, j) = xtx(j, i) = dot(cols[i], cols[j]);
    xty(i) = dot(cols[i], cols[k]);
  }
  if (k > 0) {
    for (std::size_t i = 0; i < k; ++i) xtx(i, i) += options.ridge;
    Eigen::VectorXd beta;
    if (options.ridge > 0.0) {
      beta = xtx.ldlt().solve(xty);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
      if (!lu.isInvertible()) fail(ErrorCode::SingularSystem, "normal equations are singular");
      beta = lu.solve(xty);
    }
    for (std::size_t i = 0; i < k; ++i) m.coefficients[i] = beta(static_cast<Eigen::Index>(i));
  }
  m.intercept = mean[k];
  for (std::size_t i = 0; i < k; ++i) m.intercept -= m.coefficients[i] * mean[i];
  m.rmse = model_rmse(m, table);
  return m;
}

double model_rmse(const LinearModel& model, const Table& table) {
  if (table.rows.empty()) return 0.0;
  std::vector<std::string> names = model.features;
  names.push_back(model.target);
  auto cols = numeric_columns(table, names);
  std::size_t n = table.rows.size();
  std::size_t k = model.features.size();
  std::vector<double> sq(n);
  std::vector<double> x(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) x[c] = cols[c][r];
    double e = model.predict(x) - cols[k][r];
    sq[r] = e * e;
  }
  return std::sqrt(pairwise_sum(sq.data(), n) / n);
}

}  // namespace gyp
