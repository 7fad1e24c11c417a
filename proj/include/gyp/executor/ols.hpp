/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gyp/common/gid.hpp"
#include "gyp/executor/table.hpp"
#include "json.hpp"

namespace gyp {

/// Least-squares linear model produced by the builtin learner.
struct LinearModel {
  Gid gid;
  std::vector<std::string> features;
  std::string target;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double rmse = 0.0;
  std::int64_t n_rows = 0;

  double predict(const std::vector<double>& x) const;
};

nlohmann::json model_to_json(const LinearModel& m);
LinearModel model_from_json(const nlohmann::json& j);
void write_model(const std::filesystem::path& path, const LinearModel& m);
/// Throws MissingInput when the file is absent.
LinearModel read_model(const std::filesystem::path& path);

/// Sum by recursive halving; error grows with log n rather than n.
double pairwise_sum(const double* v, std::size_t n);

struct OlsOptions {
  /// Added to the diagonal of the centered normal equations. Zero disables
  /// it, making a singular system an error.
  double ridge = 1e-9;
};

/// Fits target ~ features by ordinary least squares on centered normal
/// equations. Rows are sorted first, so any permutation of the same rows
/// yields bit-identical coefficients. Throws SingularSystem (ridge 0 only)
/// and TypeError for non-numeric columns.
LinearModel fit_ols(const Table& table, const std::vector<std::string>& features, const std::string& target,
                    OlsOptions options = {});

/// Root mean squared error of `model` over `table`.
double model_rmse(const LinearModel& model, const Table& table);

}  // namespace gyp
