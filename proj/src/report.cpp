/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kernelgen/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"
#include "kernelgen/posterior.hpp"

namespace kernelgen {

double interval_zscore(double level) {
  if (!(level > 0 && level < 1)) throw InvalidDataset("interval level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2);
}

PredictionTable predict(const KernelExpr& expr, const TimeSeriesDataset& data,
                        double noise_variance, double level, bool latent_only) {
  const double z = interval_zscore(level);
  const Eigen::VectorXd x = data.train_times(), y = data.train_values();
  const auto post = posterior<double>(expr, x, y, data.times(), noise_variance);
  PredictionTable t;
  t.time = data.times();
  t.mean = post.mean;
  Eigen::ArrayXd var = post.covariance.diagonal().array().max(0.0);
  if (!latent_only) var += noise_variance;
  t.lower = t.mean.array() - z * var.sqrt();
  t.upper = t.mean.array() + z * var.sqrt();
  return t;
}

std::string predictions_csv(const PredictionTable& t) {
  std::string out = "time,mean,lower,upper\n";
  for (Eigen::Index i = 0; i < t.time.size(); ++i)
    out += format_shortest(t.time(i)) + "," + format_shortest(t.mean(i)) + "," +
           format_shortest(t.lower(i)) + "," + format_shortest(t.upper(i)) + "\n";
  return out;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string plot_svg(const TimeSeriesDataset& data, const PredictionTable& t) {
  constexpr double W = 800, H = 400, left = 60, right = 20, top = 20, bottom = 40;
  const double t0 = t.time.minCoeff(), t1 = t.time.maxCoeff();
  double v0 = std::min({t.lower.minCoeff(), data.values().minCoeff()});
  double v1 = std::max({t.upper.maxCoeff(), data.values().maxCoeff()});
  if (!(v1 > v0)) v1 = v0 + 1;
  const double pad = 0.05 * (v1 - v0);
  v0 -= pad;
  v1 += pad;
  const double span_t = t1 > t0 ? t1 - t0 : 1.0;
  auto px = [&](double time) { return left + (time - t0) / span_t * (W - left - right); };
  auto py = [&](double v) { return top + (v1 - v) / (v1 - v0) * (H - top - bottom); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  s << "  <polygon class=\"interval\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
  for (Eigen::Index i = 0; i < t.time.size(); ++i)
    s << (i ? " " : "") << fixed(px(t.time(i))) << ',' << fixed(py(t.upper(i)));
  for (Eigen::Index i = t.time.size(); i-- > 0;)
    s << ' ' << fixed(px(t.time(i))) << ',' << fixed(py(t.lower(i)));
  s << "\"/>\n";

  s << "  <polyline class=\"mean\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index i = 0; i < t.time.size(); ++i)
    s << (i ? " " : "") << fixed(px(t.time(i))) << ',' << fixed(py(t.mean(i)));
  s << "\"/>\n";

  if (data.n_test() > 0) {
    const double split = 0.5 * (data.times()(data.n_train() - 1) + data.times()(data.n_train()));
    s << "  <line class=\"split\" x1=\"" << fixed(px(split)) << "\" y1=\"" << fixed(top)
      << "\" x2=\"" << fixed(px(split)) << "\" y2=\"" << fixed(H - bottom)
      << "\" stroke=\"#444444\" stroke-dasharray=\"6 4\"/>\n";
  }

  s << "  <g class=\"observations\">\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const bool train = i < data.n_train();
    s << "    <circle class=\"" << (train ? "train" : "test") << "\" cx=\""
      << fixed(px(data.times()(i))) << "\" cy=\"" << fixed(py(data.values()(i)))
      << "\" r=\"2.5\" fill=\"" << (train ? "#000000" : "#d62728") << "\"/>\n";
  }
  s << "  </g>\n";

  // axes with end labels
  s << "  <g class=\"axes\" stroke=\"#000000\" fill=\"none\">\n"
    << "    <line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right
    << "\" y2=\"" << H - bottom << "\"/>\n"
    << "    <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
    << H - bottom << "\"/>\n"
    << "  </g>\n"
    << "  <g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n"
    << "    <text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\">" << format_shortest(t0)
    << "</text>\n"
    << "    <text x=\"" << W - right << "\" y=\"" << H - bottom + 16
    << "\" text-anchor=\"end\">" << format_shortest(t1) << "</text>\n"
    << "    <text x=\"" << left - 4 << "\" y=\"" << fixed(top + 4) << "\" text-anchor=\"end\">"
    << fixed(v1) << "</text>\n"
    << "    <text x=\"" << left - 4 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\">"
    << fixed(v0) << "</text>\n"
    << "  </g>\n"
    << "</svg>\n";
  return s.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace kernelgen
