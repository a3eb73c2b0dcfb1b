// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/data/observations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ttrec/error.hpp"
#include "ttrec/io/fileio.hpp"

namespace ttrec::data {

CovariateTable::CovariateTable(std::vector<std::int64_t> ids, Eigen::MatrixXd rows)
    : ids_(std::move(ids)), rows_(std::move(rows)) {
  require(static_cast<std::int64_t>(ids_.size()) == rows_.rows(), Errc::dimension_mismatch,
          "covariate table: id count != row count");
  index_.reserve(ids_.size());
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    const bool inserted = index_.emplace(ids_[k], static_cast<Eigen::Index>(k)).second;
    require(inserted, Errc::config_invalid,
            "covariate table: duplicate id " + std::to_string(ids_[k]));
  }
  require(rows_.size() == 0 || rows_.allFinite(), Errc::config_invalid,
          "covariate table: non-finite entry");
}

Eigen::Index CovariateTable::row_index(std::int64_t id) const {
  const auto it = index_.find(id);
  require(it != index_.end(), Errc::invalid_argument,
          "covariate table: unknown id " + std::to_string(id));
  return it->second;
}

void validate(const ObservationSet& obs) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  pairs.reserve(obs.ratings.size());
  for (const auto& r : obs.ratings) {
    require(std::isfinite(r.value), Errc::config_invalid,
            "non-finite rating for pair (" + std::to_string(r.user) + "," +
                std::to_string(r.item) + ")");
    if (obs.user_covariates) {
      require(obs.user_covariates->contains(r.user), Errc::config_invalid,
              "rated user " + std::to_string(r.user) + " missing from covariate table");
    }
    if (obs.item_covariates) {
      require(obs.item_covariates->contains(r.item), Errc::config_invalid,
              "rated item " + std::to_string(r.item) + " missing from covariate table");
    }
    pairs.emplace_back(r.user, r.item);
  }
  std::sort(pairs.begin(), pairs.end());
  const auto dup = std::adjacent_find(pairs.begin(), pairs.end());
  require(dup == pairs.end(), Errc::config_invalid,
          dup == pairs.end() ? std::string()
                             : "duplicate rating for pair (" + std::to_string(dup->first) + "," +
                                   std::to_string(dup->second) + ")");
}

ObservationSet subset(const ObservationSet& obs, const std::vector<std::size_t>& indices) {
  ObservationSet out;
  out.user_covariates = obs.user_covariates;
  out.item_covariates = obs.item_covariates;
  out.ratings.reserve(indices.size());
  for (const std::size_t k : indices) {
    require(k < obs.ratings.size(), Errc::invalid_argument, "subset: index out of range");
    out.ratings.push_back(obs.ratings[k]);
  }
  return out;
}

void write_ratings_csv(const std::string& path, const std::vector<Rating>& ratings) {
  std::string out = "user_id,item_id,rating\n";
  for (const auto& r : ratings) {
    out += std::to_string(r.user);
    out += ',';
    out += std::to_string(r.item);
    out += ',';
    out += io::format_double(r.value);
    out += '\n';
  }
  io::atomic_write_text_file(path, out);
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::int64_t parse_id(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    fail(Errc::config_parse, where + ": bad integer '" + s + "'");
  }
  require(pos == s.size(), Errc::config_parse, where + ": bad integer '" + s + "'");
  return v;
}

double parse_num(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(Errc::config_parse, where + ": bad number '" + s + "'");
  }
  require(pos == s.size(), Errc::config_parse, where + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<Rating> read_ratings_csv(const std::string& path) {
  std::istringstream in(io::read_text_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::config_parse, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "user_id,item_id,rating", Errc::config_parse,
          path + ": expected header 'user_id,item_id,rating', got '" + line + "'");
  std::vector<Rating> ratings;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    require(fields.size() == 3, Errc::config_parse, where + ": expected 3 fields");
    ratings.push_back({parse_id(fields[0], where), parse_id(fields[1], where),
                       parse_num(fields[2], where)});
  }
  return ratings;
}

void write_covariates_csv(const std::string& path, const CovariateTable& table) {
  std::string out = "id";
  for (int j = 1; j <= table.dim(); ++j) out += ",c" + std::to_string(j);
  out += '\n';
  for (std::size_t k = 0; k < table.ids().size(); ++k) {
    out += std::to_string(table.ids()[k]);
    for (Eigen::Index j = 0; j < table.rows().cols(); ++j) {
      out += ',';
      out += io::format_double(table.rows()(static_cast<Eigen::Index>(k), j));
    }
    out += '\n';
  }
  io::atomic_write_text_file(path, out);
}

CovariateTable read_covariates_csv(const std::string& path) {
  std::istringstream in(io::read_text_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::config_parse, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, ',');
  require(header.size() >= 2 && header[0] == "id", Errc::config_parse,
          path + ": expected header 'id,c1,...'");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < dim; ++j) {
    require(header[static_cast<std::size_t>(j) + 1] == "c" + std::to_string(j + 1),
            Errc::config_parse, path + ": covariate column " + std::to_string(j + 1) +
                                    " must be named c" + std::to_string(j + 1));
  }

  std::vector<std::int64_t> ids;
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    require(static_cast<int>(fields.size()) == dim + 1, Errc::config_parse,
            where + ": expected " + std::to_string(dim + 1) + " fields");
    ids.push_back(parse_id(fields[0], where));
    for (int j = 0; j < dim; ++j)
      values.push_back(parse_num(fields[static_cast<std::size_t>(j) + 1], where));
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(ids.size()), dim);
  for (std::size_t k = 0; k < ids.size(); ++k)
    for (int j = 0; j < dim; ++j)
      rows(static_cast<Eigen::Index>(k), j) = values[k * static_cast<std::size_t>(dim) +
                                                     static_cast<std::size_t>(j)];
  return CovariateTable(std::move(ids), std::move(rows));
}

}  // namespace ttrec::data
