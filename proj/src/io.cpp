#include "lpm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lpm/errors.hpp"

namespace lpm {
namespace {

constexpr const char* kDatasetFormatKey = "format";
constexpr const char* kDatasetFormatVersion = "latentmle.dataset.v1";
constexpr const char* kHeaderPlain = "timestamp,bid,ask,order_flow";
constexpr const char* kHeaderLatent = "timestamp,bid,ask,order_flow,latent";

[[noreturn]] void fail_at(const std::string& name, std::size_t line, const std::string& what) {
  throw DataError(name + ":" + std::to_string(line) + ": " + what);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_field_double(std::string_view s, const std::string& name, std::size_t line,
                          const char* what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v))
    fail_at(name, line, std::string("cannot parse ") + what + " from '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_field_int(std::string_view s, const std::string& name, std::size_t line,
                             const char* what) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    fail_at(name, line, std::string("cannot parse ") + what + " from '" + std::string(s) + "'");
  return v;
}

void append_comment_pair(ConfigMap& map, std::string_view body) {
  // comment lines of the shape "# key=value" are a config echo; anything else
  // is a free-form comment and is skipped
  while (!body.empty() && (body.front() == ' ' || body.front() == '\t')) body.remove_prefix(1);
  const std::size_t eq = body.find('=');
  if (eq == std::string_view::npos || eq == 0) return;
  const std::string key(body.substr(0, eq));
  if (key == kDatasetFormatKey) return;  // re-emitted by every writer
  map.emplace_back(key, std::string(body.substr(eq + 1)));
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw NumericalError("format_double: conversion failed");
  return std::string(buf, end);
}

TickFile parse_ticks(std::istream& in, const std::string& name) {
  TickFile tf;
  std::string raw;
  std::size_t lineno = 0;
  bool header_seen = false;
  double prev_ts = -std::numeric_limits<double>::infinity();
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      append_comment_pair(tf.comments, line.substr(1));
      continue;
    }
    if (!header_seen) {
      if (line == kHeaderPlain)
        tf.has_latent = false;
      else if (line == kHeaderLatent)
        tf.has_latent = true;
      else
        fail_at(name, lineno, "unrecognized header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    const std::size_t expected = tf.has_latent ? 5 : 4;
    if (fields.size() != expected)
      fail_at(name, lineno,
              "expected " + std::to_string(expected) + " fields, got " +
                  std::to_string(fields.size()));
    TickRecord rec;
    rec.timestamp = parse_field_double(fields[0], name, lineno, "timestamp");
    rec.bid = parse_field_int(fields[1], name, lineno, "bid");
    rec.ask = parse_field_int(fields[2], name, lineno, "ask");
    rec.order_flow = parse_field_double(fields[3], name, lineno, "order_flow");
    if (tf.has_latent) rec.latent = parse_field_double(fields[4], name, lineno, "latent");
    if (rec.timestamp < prev_ts) fail_at(name, lineno, "timestamps decrease");
    if (!(rec.bid < rec.ask)) fail_at(name, lineno, "bid >= ask");
    prev_ts = rec.timestamp;
    tf.records.push_back(rec);
  }
  return tf;
}

TickFile load_ticks(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open tick file '" + path + "'");
  return parse_ticks(f, path);
}

MarketPath resample(const TickFile& ticks, double step, double gap_threshold,
                    int* gaps_flagged) {
  if (!(step > 0.0)) throw std::invalid_argument("resample: step must be > 0");
  if (!(gap_threshold > 0.0))
    throw std::invalid_argument("resample: gap_threshold must be > 0");
  const auto& recs = ticks.records;
  if (recs.size() < 2) throw DataError("resample: need at least two ticks");

  int gaps = 0;
  for (std::size_t i = 1; i < recs.size(); ++i)
    if (recs[i].timestamp - recs[i - 1].timestamp > gap_threshold) ++gaps;
  if (gaps_flagged) *gaps_flagged = gaps;

  const double t0 = std::ceil(recs.front().timestamp / step - 1e-9) * step;
  const long n = static_cast<long>(std::floor((recs.back().timestamp - t0) / step + 1e-9)) + 1;
  if (n < 2) throw DataError("resample: tick span covers less than one step");

  MarketPath out;
  out.dt_obs = step;
  out.times.reserve(n);
  out.order_flow.reserve(n);
  out.bid.reserve(n);
  out.ask.reserve(n);
  if (ticks.has_latent) out.latent.emplace().reserve(n);

  std::size_t j = 0;
  double base = 0.0;
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    while (j + 1 < recs.size() && recs[j + 1].timestamp <= t + 1e-9) ++j;
    if (k == 0) base = recs[j].order_flow;
    out.times.push_back(t);
    out.order_flow.push_back(recs[j].order_flow - base);
    out.bid.push_back(recs[j].bid);
    out.ask.push_back(recs[j].ask);
    if (ticks.has_latent) out.latent->push_back(recs[j].latent);
  }
  out.validate();
  return out;
}

void write_dataset(const MarketPath& path, const std::string& dest, const ConfigMap& config) {
  path.validate();
  std::ofstream f(dest);
  if (!f) throw DataError("cannot open '" + dest + "' for writing");
  f << "# " << kDatasetFormatKey << "=" << kDatasetFormatVersion << "\n";
  for (const auto& [k, v] : config) f << "# " << k << "=" << v << "\n";
  f << (path.latent ? kHeaderLatent : kHeaderPlain) << "\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    f << format_double(path.times[i]) << ',' << path.bid[i] << ',' << path.ask[i] << ','
      << format_double(path.order_flow[i]);
    if (path.latent) f << ',' << format_double((*path.latent)[i]);
    f << '\n';
  }
  f.flush();
  if (!f) throw DataError("write failed for '" + dest + "'");
}

namespace {

void write_result_stream(std::ostream& f, const EstimationResult& r) {
  f << kResultFormatVersion << "\n";
  f << "# config\n";
  for (const auto& [k, v] : r.config) f << k << "=" << v << "\n";
  f << "# estimates\n";
  f << "sigma_bar2_hat=" << format_double(r.sigma_bar2_hat) << "\n";
  f << "Sigma_hat=" << format_double(r.Sigma_hat) << "\n";
  f << "m_blocks=" << r.m_blocks << "\n";
  f << "alpha2_hat=" << format_double(r.alpha2_hat) << "\n";
  f << "beta_hat=" << format_double(r.beta_hat) << "\n";
  f << "sigma2_hat=" << format_double(r.sigma2_hat) << "\n";
  f << "eps_hat=" << format_double(r.eps_hat) << "\n";
  f << "eps_clamped=" << (r.eps_clamped ? 1 : 0) << "\n";
  f << "excluded=" << r.excluded << "\n";
  f << "ties=";
  for (std::size_t i = 0; i < r.ties.size(); ++i) f << (i ? " " : "") << r.ties[i];
  f << "\n";
  f << "runtime_seconds=" << format_double(r.runtime_seconds) << "\n";
  f << "kernel_builds=" << r.kernel_builds << "\n";
  f << "filter_steps=" << r.filter_steps << "\n";
  f << "workers=" << r.workers << "\n";
  f << "# surface\n";
  f << "alpha2,sigma2,beta,loglik\n";
  for (const auto& row : r.surface)
    f << format_double(row.alpha2) << ',' << format_double(row.sigma2) << ','
      << format_double(row.beta) << ',' << format_double(row.loglik) << "\n";
}

}  // namespace

void save_result(const EstimationResult& r, const std::string& dest) {
  std::ofstream f(dest);
  if (!f) throw DataError("cannot open '" + dest + "' for writing");
  write_result_stream(f, r);
  f.flush();
  if (!f) throw DataError("write failed for '" + dest + "'");
}

EstimationResult load_result(const std::string& source) {
  std::ifstream f(source);
  if (!f) throw DataError("cannot open result file '" + source + "'");
  std::string raw;
  std::size_t lineno = 0;

  if (!std::getline(f, raw)) throw DataError(source + ": empty result file");
  ++lineno;
  if (std::string(strip_cr(raw)) != kResultFormatVersion)
    throw DataError(source + ": unsupported result format version '" + raw + "', expected '" +
                    kResultFormatVersion + "'");

  EstimationResult r;
  enum class Section { none, config, estimates, surface } section = Section::none;
  bool surface_header_seen = false;
  while (std::getline(f, raw)) {
    ++lineno;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line == "# config") { section = Section::config; continue; }
    if (line == "# estimates") { section = Section::estimates; continue; }
    if (line == "# surface") { section = Section::surface; continue; }
    switch (section) {
      case Section::none:
        fail_at(source, lineno, "content before the first section header");
      case Section::config: {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0)
          fail_at(source, lineno, "config line is not key=value");
        r.config.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
        break;
      }
      case Section::estimates: {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0)
          fail_at(source, lineno, "estimate line is not key=value");
        const std::string key(line.substr(0, eq));
        const std::string_view val = line.substr(eq + 1);
        if (key == "sigma_bar2_hat") r.sigma_bar2_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "Sigma_hat") r.Sigma_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "m_blocks") r.m_blocks = static_cast<int>(parse_field_int(val, source, lineno, key.c_str()));
        else if (key == "alpha2_hat") r.alpha2_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "beta_hat") r.beta_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "sigma2_hat") r.sigma2_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "eps_hat") r.eps_hat = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "eps_clamped") r.eps_clamped = parse_field_int(val, source, lineno, key.c_str()) != 0;
        else if (key == "excluded") r.excluded = static_cast<int>(parse_field_int(val, source, lineno, key.c_str()));
        else if (key == "ties") {
          std::istringstream ss{std::string(val)};
          std::size_t idx = 0;
          while (ss >> idx) r.ties.push_back(idx);
        }
        else if (key == "runtime_seconds") r.runtime_seconds = parse_field_double(val, source, lineno, key.c_str());
        else if (key == "kernel_builds") r.kernel_builds = parse_field_int(val, source, lineno, key.c_str());
        else if (key == "filter_steps") r.filter_steps = parse_field_int(val, source, lineno, key.c_str());
        else if (key == "workers") r.workers = static_cast<int>(parse_field_int(val, source, lineno, key.c_str()));
        else fail_at(source, lineno, "unknown estimate key '" + key + "'");
        break;
      }
      case Section::surface: {
        if (!surface_header_seen) {
          if (line != "alpha2,sigma2,beta,loglik")
            fail_at(source, lineno, "unrecognized surface header");
          surface_header_seen = true;
          break;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 4) fail_at(source, lineno, "surface row needs 4 fields");
        MleResult::Row row;
        row.alpha2 = parse_field_double(fields[0], source, lineno, "alpha2");
        row.sigma2 = parse_field_double(fields[1], source, lineno, "sigma2");
        row.beta = parse_field_double(fields[2], source, lineno, "beta");
        row.loglik = parse_field_double(fields[3], source, lineno, "loglik");
        r.surface.push_back(row);
        break;
      }
    }
  }
  return r;
}

ConfigMap load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file '" + path + "'");
  ConfigMap out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(f, raw)) {
    ++lineno;
    const std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0)
      fail_at(path, lineno, "config line is not key=value");
    out.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace lpm
