#pragma once

#include <chrono>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rte/fit.hpp"
#include "rte_cli/config.hpp"

namespace rte::cli {

inline constexpr const char* kToolName = "rte-inverse";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverFailure = 3, kCheckFailed = 4 };

// Shortest text that round-trips a double: 17 significant digits.
std::string format_number(double v);

// In-memory CSV with a fixed header; cells are numbers or text.
class Csv {
public:
  struct Cell {
    Cell(double v) : text(format_number(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(long long v) : text(std::to_string(v)) {}
    Cell(unsigned long v) : text(std::to_string(v)) {}
    Cell(bool v) : text(v ? "1" : "0") {}
    Cell(const char* v) : text(v) {}
    Cell(std::string v) : text(std::move(v)) {}
    std::string text;
  };

  explicit Csv(std::vector<std::string> header);
  Csv& row(std::vector<Cell> cells);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return body_; }

private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string body_;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::optional<double> lower, upper;
  bool pass = false;
};

struct FitEntry {
  std::string name;
  LinearFit fit;
  std::optional<double> predicted;  // exponent the theory predicts, when there is one
  std::string note;
};

class RunReport {
public:
  RunReport(std::string command, Config config)
      : command_(std::move(command)), config_(std::move(config)) {}

  const std::string& command() const { return command_; }
  const Config& config() const { return config_; }

  nlohmann::json& metrics() { return metrics_; }
  const nlohmann::json& metrics() const { return metrics_; }

  void flag(const std::string& f);
  bool has_flag(const std::string& f) const;
  const std::vector<std::string>& flags() const { return flags_; }

  void fit(FitEntry e) { fits_.push_back(std::move(e)); }
  const std::vector<FitEntry>& fits() const { return fits_; }

  const Check& check_at_most(const std::string& name, double value, double limit);
  const Check& check_at_least(const std::string& name, double value, double limit);
  const Check& check_within(const std::string& name, double value, double lo, double hi);
  const Check& check_true(const std::string& name, bool ok);
  const std::vector<Check>& checks() const { return checks_; }
  bool checks_passed() const;

  void timing(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }
  // Runs f and records its wall time under stage.
  template <class F>
  decltype(auto) timed(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      RunReport* r;
      const std::string& s;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        r->timing(s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
    } rec{this, stage, t0};
    return f();
  }

  // Output file (CSV or field dump) written next to report.json.
  void add_file(const std::string& name, std::string content);
  void add_csv(const std::string& name, const Csv& csv) { add_file(name, csv.str()); }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
  const std::string* file(const std::string& name) const;

  nlohmann::json to_json(const std::string& status) const;

private:
  std::string command_;
  Config config_;
  nlohmann::json metrics_ = nlohmann::json::object();
  std::vector<std::string> flags_;
  std::vector<FitEntry> fits_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, double>> timings_;
  std::vector<std::pair<std::string, std::string>> files_;
};

nlohmann::json fit_json(const FitEntry& e);

// Writes every file of the report plus report.json into dir.
void write_outputs(const RunReport& report, const std::filesystem::path& dir,
                   const std::string& status);

// Report for a run that failed before or during the computation.
nlohmann::json error_json(const std::string& command, const std::string& status,
                          const std::string& message);

}  // namespace rte::cli
