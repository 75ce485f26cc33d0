// Copyright 2026 The GAMPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAMPS_IO_HPP
#define GAMPS_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"

/**
 * \file
 * \brief Dataset files (NDJSON), CSV output and content hashes.
 *
 * A dataset file starts with one header object carrying `format`,
 * `version` and any manifest fields; each following line is one trajectory
 * `{"terminal": bool, "steps": [[s, a, r, s', log π_b(a|s)], ...]}`.
 */

namespace gamps {

using Json = nlohmann::json;

inline constexpr std::string_view kDatasetFormat = "gamps.dataset";
inline constexpr int kDatasetVersion = 1;

/// Shortest text that parses back to exactly `x`.
inline std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return {buf, res.ptr};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_hash(std::string_view text) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(text);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xFU];
    h >>= 4U;
  }
  return out;
}

inline std::string hash_json(const Json& j) { return hex_hash(j.dump()); }

inline std::string hash_vector(const Vector& v) {
  std::string text;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    text += format_double(v(i));
    text += ',';
  }
  return hex_hash(text);
}

template <class S, class A>
void write_dataset(std::ostream& out, const Dataset<S, A>& data, Json header = Json::object()) {
  header["format"] = kDatasetFormat;
  header["version"] = kDatasetVersion;
  header["n_trajectories"] = data.size();
  header["behavior_policy_id"] = data.behavior_policy_id;
  out << header.dump() << '\n';
  for (const auto& traj : data.trajectories) {
    Json steps = Json::array();
    for (const auto& st : traj.steps) {
      steps.push_back(Json::array({st.state, st.action, st.reward, st.next_state, st.behavior_logp}));
    }
    out << Json{{"terminal", traj.terminal}, {"steps", std::move(steps)}}.dump() << '\n';
  }
  if (!out) {
    throw RuntimeError("failed to write dataset");
  }
}

template <class S, class A>
struct LoadedDataset {
  Dataset<S, A> data;
  Json header;
};

namespace detail {

template <class T>
T json_number(const Json& j, std::size_t line) {
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) {
      throw InvalidDatasetError("dataset line " + std::to_string(line) + ": expected an integer");
    }
  } else if (!j.is_number()) {
    throw InvalidDatasetError("dataset line " + std::to_string(line) + ": expected a number");
  }
  return j.get<T>();
}

}  // namespace detail

template <class S, class A>
LoadedDataset<S, A> read_dataset(std::istream& in) {
  LoadedDataset<S, A> out;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidDatasetError("dataset is empty");
  }
  try {
    out.header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw InvalidDatasetError(std::string("dataset header is not JSON: ") + e.what());
  }
  if (!out.header.is_object() || out.header.value("format", "") != kDatasetFormat) {
    throw InvalidDatasetError("not a gamps dataset (bad header)");
  }
  if (out.header.value("version", -1) != kDatasetVersion) {
    throw InvalidDatasetError("unsupported dataset version");
  }
  out.data.behavior_policy_id = out.header.value("behavior_policy_id", "");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw InvalidDatasetError("dataset line " + std::to_string(lineno) + " is not JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
      throw InvalidDatasetError("dataset line " + std::to_string(lineno) + ": missing steps");
    }
    Trajectory<S, A> traj;
    traj.terminal = j.value("terminal", false);
    for (const auto& st : j["steps"]) {
      if (!st.is_array() || st.size() != 5) {
        throw InvalidDatasetError("dataset line " + std::to_string(lineno) + ": steps must have 5 fields");
      }
      traj.steps.push_back({detail::json_number<S>(st[0], lineno), detail::json_number<A>(st[1], lineno),
                            detail::json_number<double>(st[2], lineno), detail::json_number<S>(st[3], lineno),
                            detail::json_number<double>(st[4], lineno)});
    }
    out.data.trajectories.push_back(std::move(traj));
  }
  const auto expected = out.header.value("n_trajectories", out.data.size());
  if (expected != out.data.size()) {
    throw InvalidDatasetError("dataset holds " + std::to_string(out.data.size()) + " trajectories, header says " +
                              std::to_string(expected));
  }
  return out;
}

template <class S, class A>
LoadedDataset<S, A> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw RuntimeError("cannot open dataset '" + path + "'");
  }
  return read_dataset<S, A>(in);
}

/// Minimal CSV writer: a `#` comment header, one column header line, then rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& comments, const std::vector<std::string>& columns)
      : out_{out}, n_columns_{columns.size()} {
    for (const auto& c : comments) {
      out_ << "# " << c << '\n';
    }
    write_row(columns);
  }

  void write_row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_) {
      throw RuntimeError("csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(n_columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out_ << (i == 0 ? "" : ",") << cells[i];
    }
    out_ << '\n';
  }

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }

 private:
  std::ostream& out_;
  std::size_t n_columns_;
};

}  // namespace gamps

#endif  // GAMPS_IO_HPP
