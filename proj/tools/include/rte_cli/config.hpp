#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace rte::cli {

enum class KeyType { Int, Double, Bool, String, IntList, DoubleList };

struct KeySpec {
  std::string name;
  KeyType type;
  nlohmann::json fallback;
  std::string help;
};

// Every accepted key with its type and default.
const std::vector<KeySpec>& config_schema();

// Flat, typed key-value configuration. Construction validates the whole
// document and reports every offending key in one ConfigurationError.
class Config {
public:
  Config() : Config(nlohmann::json::object(), {}) {}
  Config(nlohmann::json input, const std::vector<std::string>& overrides);

  static Config load(const std::filesystem::path& path, const std::vector<std::string>& overrides);

  // The document as given and the overrides applied on top of it.
  const nlohmann::json& input() const { return input_; }
  const std::vector<std::string>& overrides() const { return overrides_; }
  // Input plus overrides plus defaults for every schema key.
  const nlohmann::json& effective() const { return effective_; }

  int integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::uint64_t seed() const;

  // Copy with extra overrides, re-validated.
  Config with(const std::vector<std::string>& overrides) const;

private:
  const nlohmann::json& at(const std::string& key, KeyType type) const;

  nlohmann::json input_;
  std::vector<std::string> overrides_;
  nlohmann::json effective_;
};

}  // namespace rte::cli
