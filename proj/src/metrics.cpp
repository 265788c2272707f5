// Copyright 2025 The Ambisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ambisteer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ambisteer {

double angular_error_deg(const SphericalDirection& a, const SphericalDirection& b) {
  return rad_to_deg(angular_distance(a, b));
}

double utterance_mae_deg(const Trajectory& est, const Trajectory& truth) {
  if (est.size() != truth.size() || est.size() == 0)
    throw std::invalid_argument("utterance_mae: trajectory length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i)
    acc += angular_error_deg(est.direction(i), truth.direction(i));
  return acc / est.size();
}

double si_sdr_db(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size() || est.empty())
    throw std::invalid_argument("si_sdr: length mismatch");
  double rr = 0.0, er = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    rr += ref[i] * ref[i];
    er += est[i] * ref[i];
  }
  if (rr == 0.0) throw std::invalid_argument("si_sdr: zero reference");
  const double alpha = er / rr;
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double s = alpha * ref[i];
    const double e = est[i] - s;
    sig += s * s;
    err += e * e;
  }
  if (err <= 0.0 || sig / err >= std::pow(10.0, kSiSdrCapDb / 10.0))
    return kSiSdrCapDb;
  if (sig <= 0.0) return -kSiSdrCapDb;
  return std::max(-kSiSdrCapDb, 10.0 * std::log10(sig / err));
}

double min_interferer_distance_deg(const Trajectory& target,
                                   const std::vector<Trajectory>& interferers,
                                   int window) {
  if (window < 1) throw std::invalid_argument("min_interferer_distance: bad window");
  double best = 180.0;
  for (const Trajectory& intf : interferers) {
    const std::size_t n = std::min(target.size(), intf.size());
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = angular_error_deg(target.direction(i), intf.direction(i));
    const int half = window / 2;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      int cnt = 0;
      for (int j = -half; j <= half; ++j) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) + j;
        if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n)) {
          acc += d[idx];
          ++cnt;
        }
      }
      best = std::min(best, acc / cnt);
    }
  }
  return best;
}

void BinEdges::validate() const {
  if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 180.0)
    throw std::invalid_argument("BinEdges: must span [0, 180]");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1])
      throw std::invalid_argument("BinEdges: edges must increase");
}

int BinEdges::bin_of(double deg) const {
  for (int b = 0; b < count() - 1; ++b)
    if (deg < edges[b + 1]) return b;
  return count() - 1;  // last bin is closed at 180
}

std::string BinEdges::label(int bin) const {
  std::ostringstream ss;
  ss << edges[bin] << "-" << edges[bin + 1] << "deg";
  return ss.str();
}

namespace {

struct Accumulator {
  std::vector<double> mae, sisdr;
};

SummaryRow make_row(const std::string& mode, const std::string& label,
                    const Accumulator& acc) {
  const int n = static_cast<int>(acc.mae.size());
  if (n < 2)
    throw std::invalid_argument("summarize: group '" + mode + "/" + label +
                                "' needs at least 2 records");
  auto mean_ci = [n](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (n - 1);
    return std::pair<double, double>{mean, 1.96 * std::sqrt(var / n)};
  };
  SummaryRow row;
  row.mode = mode;
  row.bin_label = label;
  row.count = n;
  std::tie(row.mae_mean, row.mae_ci) = mean_ci(acc.mae);
  std::tie(row.si_sdr_mean, row.si_sdr_ci) = mean_ci(acc.sisdr);
  return row;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records,
                                  const BinEdges& bins) {
  bins.validate();
  if (records.empty()) throw std::invalid_argument("summarize: no records");

  std::map<std::string, Accumulator> overall;
  std::map<std::pair<std::string, int>, Accumulator> binned;
  for (const EvalRecord& r : records) {
    overall[r.mode].mae.push_back(r.mae_deg);
    overall[r.mode].sisdr.push_back(r.si_sdr_db);
    auto& acc = binned[{r.mode, bins.bin_of(r.min_interferer_deg)}];
    acc.mae.push_back(r.mae_deg);
    acc.sisdr.push_back(r.si_sdr_db);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [mode, acc] : overall)
    rows.push_back(make_row(mode, "all", acc));
  for (const auto& [key, acc] : binned)
    rows.push_back(make_row(key.first, bins.label(key.second), acc));
  return rows;
}

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<EvalRecord>& records) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_records_csv: cannot open " + path.string());
  f << "scene_id,mode,mae_deg,si_sdr_db,min_interferer_deg,runtime_s\n";
  char line[256];
  for (const EvalRecord& r : records) {
    std::snprintf(line, sizeof(line), "%s,%s,%.12g,%.12g,%.12g,%.6g\n",
                  r.scene_id.c_str(), r.mode.c_str(), r.mae_deg, r.si_sdr_db,
                  r.min_interferer_deg, r.runtime_s);
    f << line;
  }
}

std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_records_csv: cannot open " + path.string());
  std::vector<EvalRecord> records;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    EvalRecord r;
    std::string cell;
    std::getline(ss, r.scene_id, ',');
    std::getline(ss, r.mode, ',');
    std::getline(ss, cell, ',');
    r.mae_deg = std::stod(cell);
    std::getline(ss, cell, ',');
    r.si_sdr_db = std::stod(cell);
    std::getline(ss, cell, ',');
    r.min_interferer_deg = std::stod(cell);
    std::getline(ss, cell, ',');
    r.runtime_s = std::stod(cell);
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_summary_csv: cannot open " + path.string());
  f << "mode,bin,count,mae_mean_deg,mae_ci95,si_sdr_mean_db,si_sdr_ci95\n";
  char line[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%d,%.12g,%.12g,%.12g,%.12g\n",
                  r.mode.c_str(), r.bin_label.c_str(), r.count, r.mae_mean,
                  r.mae_ci, r.si_sdr_mean, r.si_sdr_ci);
    f << line;
  }
}

void write_summary_markdown(const std::filesystem::path& path,
                            const std::vector<SummaryRow>& rows) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("write_summary_markdown: cannot open " + path.string());
  f << "| mode | bin | n | MAE (deg) | SI-SDR (dB) |\n";
  f << "|------|-----|---|-----------|-------------|\n";
  char line[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(line, sizeof(line),
                  "| %s | %s | %d | %.2f +/- %.2f | %.2f +/- %.2f |\n",
                  r.mode.c_str(), r.bin_label.c_str(), r.count, r.mae_mean,
                  r.mae_ci, r.si_sdr_mean, r.si_sdr_ci);
    f << line;
  }
}

}  // namespace ambisteer
