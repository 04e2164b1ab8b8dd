#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace wsv::app {

/// Exit status contract of the command-line tool.
enum Exit : int {
    kOk = 0,
    kConfigError = 1,
    kNumericalFailure = 2,
    kCertificationFailure = 3,
};

/// Flat `section.key = value` configuration; '#' starts a comment.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;

    /// Throws a parameter error naming the first key outside `known`.
    void require_known(const std::vector<std::string>& known) const;

private:
    std::map<std::string, std::string> values_;
};

/// `name(a, b, ...)` or `name`.
struct Selector {
    std::string name;
    std::vector<std::string> args;

    static Selector parse(const std::string& text);
    double arg(std::size_t k, double fallback) const;
    double arg(std::size_t k) const;
};

/**
 * Runs one command. Output files go to the configured directory; failures are
 * reported as a single `error: kind=... reason="..."` line on `err`.
 */
int run(const Config& config, std::ostream& err);

/// argv front end: parses flags, loads the config and calls run().
int main_entry(int argc, char** argv);

}  // namespace wsv::app
