#include "rte_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rte/error.hpp"

namespace rte::cli {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + header[i];
  body_ += '\n';
}

Csv& Csv::row(std::vector<Cell> cells) {
  if (cells.size() != columns_) throw ArgumentError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) body_ += (i ? "," : "") + cells[i].text;
  body_ += '\n';
  ++rows_;
  return *this;
}

void RunReport::flag(const std::string& f) {
  if (!has_flag(f)) flags_.push_back(f);
}

bool RunReport::has_flag(const std::string& f) const {
  return std::find(flags_.begin(), flags_.end(), f) != flags_.end();
}

const Check& RunReport::check_at_most(const std::string& name, double value, double limit) {
  checks_.push_back({name, value, std::nullopt, limit, value <= limit});
  return checks_.back();
}

const Check& RunReport::check_at_least(const std::string& name, double value, double limit) {
  checks_.push_back({name, value, limit, std::nullopt, value >= limit});
  return checks_.back();
}

const Check& RunReport::check_within(const std::string& name, double value, double lo, double hi) {
  checks_.push_back({name, value, lo, hi, value >= lo && value <= hi});
  return checks_.back();
}

const Check& RunReport::check_true(const std::string& name, bool ok) {
  checks_.push_back({name, ok ? 1.0 : 0.0, 1.0, std::nullopt, ok});
  return checks_.back();
}

bool RunReport::checks_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

void RunReport::add_file(const std::string& name, std::string content) {
  for (auto& [n, c] : files_)
    if (n == name) {
      c = std::move(content);
      return;
    }
  files_.emplace_back(name, std::move(content));
}

const std::string* RunReport::file(const std::string& name) const {
  for (const auto& [n, c] : files_)
    if (n == name) return &c;
  return nullptr;
}

namespace {

// JSON has no NaN or infinity; those become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json fit_json(const FitEntry& e) {
  json j;
  j["name"] = e.name;
  j["slope"] = number(e.fit.slope);
  j["intercept"] = number(e.fit.intercept);
  j["r2"] = number(e.fit.r2);
  j["slope_stderr"] = number(e.fit.slope_stderr);
  // Two standard errors either side of the slope.
  j["band"] = {number(e.fit.slope - 2.0 * e.fit.slope_stderr),
               number(e.fit.slope + 2.0 * e.fit.slope_stderr)};
  j["points"] = e.fit.n;
  j["predicted"] = e.predicted ? number(*e.predicted) : json(nullptr);
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

json RunReport::to_json(const std::string& status) const {
  json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = command_;
  j["status"] = status;
  j["config"] = {{"input", config_.input()},
                 {"overrides", config_.overrides()},
                 {"effective", config_.effective()}};
  j["seed"] = config_.seed();
  json t = json::array();
  for (const auto& [stage, s] : timings_) t.push_back({{"stage", stage}, {"seconds", s}});
  j["timings"] = t;
  j["metrics"] = metrics_;
  json f = json::array();
  for (const FitEntry& e : fits_) f.push_back(fit_json(e));
  j["fits"] = f;
  json c = json::array();
  for (const Check& k : checks_) {
    json e{{"name", k.name}, {"value", number(k.value)}, {"pass", k.pass}};
    if (k.lower) e["lower"] = number(*k.lower);
    if (k.upper) e["upper"] = number(*k.upper);
    c.push_back(e);
  }
  j["checks"] = c;
  j["checks_passed"] = checks_passed();
  j["flags"] = flags_;
  json files = json::array();
  for (const auto& [n, content] : files_) files.push_back(n);
  j["files"] = files;
  return j;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir,
                   const std::string& status) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : report.files()) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write " + (dir / name).string());
    out << content;
  }
  std::ofstream out(dir / "report.json", std::ios::binary);
  if (!out) throw ConfigurationError("cannot write " + (dir / "report.json").string());
  out << report.to_json(status).dump(2) << '\n';
}

json error_json(const std::string& command, const std::string& status, const std::string& message) {
  return {{"tool", kToolName}, {"version", kVersion}, {"command", command},
          {"status", status},  {"error", message}};
}

}  // namespace rte::cli
