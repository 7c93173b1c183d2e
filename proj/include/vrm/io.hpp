#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrm/cdfdist.hpp"
#include "vrm/core.hpp"
#include "vrm/covering.hpp"
#include "vrm/diagnostics.hpp"
#include "vrm/learn.hpp"
#include "vrm/vicinity.hpp"

namespace vrm {

using Json = nlohmann::ordered_json;

/// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError naming `where` if `j` is not an object or has a key
/// outside `allowed`.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

Json to_json(const SyntheticDistribution& dist);
SyntheticDistribution distribution_from_json(const Json& j);

Json to_json(const VicinitySpec& spec);
VicinitySpec vicinity_from_json(const Json& j);

Json to_json(const LossSpec& loss);
LossSpec loss_from_json(const Json& j);

Json to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const Json& j);

Json to_json(const FiniteClass& cls);
/// Accepts explicit {"loss", "hypotheses"} or {"loss", "random": {count,
/// scale, seed}}; random classes are drawn with `input_dim` inputs.
FiniteClass class_from_json(const Json& j, std::size_t input_dim);

Json to_json(const SampleSet& s);
SampleSet sample_set_from_json(const Json& j);

Json to_json(const Estimate& e);
Json to_json(const CoverResult& c);
Json to_json(const SandwichReport& r);
Json to_json(const UenResult& r);
Json to_json(const ExpectedCoverReport& r);
Json to_json(const DkwDecayResult& r);
Json to_json(const GapResult& r);
Json to_json(const SymmetrizationReport& r);
Json to_json(const OmegaEstimate& o);
Json to_json(const EtaTriple& e);
Json to_json(const EtaSignReport& r);
Json to_json(const BoundReport& r);
Json to_json(const CoverageReport& r);

/// Shortest round-trip decimal form ("%.17g").
std::string format_number(double v);
std::string format_number(std::size_t v);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Long-format CSV whose first line is "# vrm <version> config=<hash>".
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, std::string config_hash, std::vector<std::string> columns);

  void add(std::vector<std::string> row);
  /// Writes the file; returns its path.
  std::filesystem::path write() const;

 private:
  std::filesystem::path path_;
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace vrm
