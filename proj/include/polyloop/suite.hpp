#pragma once

// Named property checks over all modules.  Each property draws its inputs
// from an Rng seeded by (suite seed, property name), so a fixed seed
// reproduces every trial bit for bit.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyloop/path_sections.hpp"
#include "polyloop/random.hpp"

namespace polyloop {

struct Metric {
  enum class Direction { below, above };

  std::string name;
  double value;
  double threshold;
  Direction direction = Direction::below;

  bool pass() const;
};

struct PropertyResult {
  std::string name;
  std::string module;
  int trials = 0;
  int rejections = 0;
  std::vector<Metric> metrics;
  std::vector<std::string> failures;
  std::string error;  ///< unexpected exception text

  bool pass() const;
};

struct SuiteConfig {
  std::uint64_t seed = 20240611;
  int trials = 0;  ///< 0 keeps each property's default count
  std::map<std::string, double> tolerances;  ///< keyed by full metric name
  std::optional<std::string> only;  ///< run properties whose name starts with this
};

class PropertyContext {
 public:
  PropertyContext(const SuiteConfig& config, const std::string& property, int default_trials);

  Rng& rng() { return rng_; }
  int trials() const { return trials_; }

  /// Records max-type metric `property.name` with its default threshold,
  /// unless overridden in the config.
  void below(const std::string& name, double value, double threshold);
  void above(const std::string& name, double value, double threshold);
  void reject() { ++result_.rejections; }
  void fail(std::string what) { result_.failures.push_back(std::move(what)); }

  PropertyResult& result() { return result_; }

 private:
  void add(const std::string& name, double value, double threshold, Metric::Direction d);

  const SuiteConfig& config_;
  Rng rng_;
  int trials_;
  PropertyResult result_;
};

struct Property {
  std::string name;
  std::string module;
  int default_trials;
  std::function<void(PropertyContext&)> run;
};

const std::vector<Property>& property_registry();

PropertyResult run_property(const Property& p, const SuiteConfig& config);

/// Runs the registry; returns the report (schema 1) and sets `all_pass`.
nlohmann::json run_suite(const SuiteConfig& config, bool& all_pass,
                         const std::function<void(const PropertyResult&)>& on_result = {});

void to_json(nlohmann::json& j, const PropertyResult& r);

/// Randomised section sweeps used by the suite and the CLI.
struct SweepOptions {
  Group group = Group::U;
  Eigen::Index dim = 2;
  int trials = 200;
  /// Fraction of U/SU trials whose g is built with an eigenvalue on the cut.
  double cut_fraction = 0.0;
  int grid = kDefaultGrid;
};

SweepReport run_section_sweep(const SweepOptions& options, Rng& rng);

/// Thresholds applied to sweep maxima.
struct SweepThresholds {
  double endpoint = 1e-9;
  double group = 1e-9;
  double det = 1e-10;
  double poly = 1e-8;
};

bool sweep_passes(const SweepReport& r, const SweepThresholds& t = {});

}  // namespace polyloop
