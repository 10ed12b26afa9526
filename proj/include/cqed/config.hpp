#pragma once

// Flat key=value run configuration. Every key has a default; an empty file
// reproduces the calibrated scenario. Unknown keys and malformed values are
// ConfigError (with the offending key and line).

#include "cqed/fitting.hpp"
#include "cqed/lineshape.hpp"
#include "cqed/lm.hpp"
#include "cqed/optics.hpp"
#include "cqed/tuning.hpp"
#include "cqed/wgm.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cqed {

enum class KeyType { real, integer, real_or_auto, text };

struct KeySpec {
    std::string_view key;
    KeyType type;
    std::string_view default_value;
    std::string_view doc;
};

// Environment variable naming a config file used when no --config is given.
inline constexpr const char* kConfigEnvVar = "CQED_CONFIG";

class RunConfig {
public:
    RunConfig();

    static const std::vector<KeySpec>& keys();

    // `source` names the input in error messages.
    static RunConfig parse(std::istream& is, std::string_view source = "config");
    static RunConfig load(const std::filesystem::path& path);

    void set(std::string_view key, std::string_view value);
    const std::string& raw(std::string_view key) const;

    double real(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    bool is_auto(std::string_view key) const;

    TuningModel tuning() const;
    EmissionModel emission() const;
    GridSpec grid() const;
    double resolution() const { return real("instrument.resolution"); }
    double coupling() const { return real("coupling.g"); }
    std::vector<double> temperatures() const;
    DoubletFitOptions doublet_fit() const;
    AnticrossingOptions anticrossing() const;
    LmOptions lm() const;
    CavityOptics optics() const;
    PhysicalConstants constants() const;
    DiskGeometry disk() const;
    std::pair<double, double> wgm_window() const;

    // Commented listing of all keys with their current values; parses back to *this.
    void write(std::ostream& os) const;
    // Commented listing of all keys with their defaults; parses back to defaults.
    static void write_defaults(std::ostream& os);

private:
    std::map<std::string, std::string, std::less<>> values_;
};

// "30", "4,10,30" or "start:stop:step" (inclusive of stop within 1e-9).
std::vector<double> parse_temperature_list(std::string_view text);

// "a:b" -> (a, b)
std::pair<double, double> parse_range(std::string_view text);

std::vector<std::string> split_list(std::string_view text);

} // namespace cqed
