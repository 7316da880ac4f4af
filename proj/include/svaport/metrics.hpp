#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svaport/rtl.hpp"
#include "svaport/trojan.hpp"

namespace svaport::metrics {

/// Exact probability `num / 2^exp`, kept reduced (num odd or zero).
struct Dyadic {
    std::uint64_t num = 1;
    unsigned exp = 0;

    static Dyadic make(std::uint64_t num, unsigned exp);
    double to_double() const;
    /// log10 of the value without going through a (possibly underflowing) double.
    double log10() const;
    std::string to_string() const;  // "num/2^exp"
    bool operator==(const Dyadic&) const = default;
};

/// Trojan probability index, log10(1 / P).  Throws DomainError unless 0 < P <= 1.
double tpi(double p);
double tpi(const Dyadic& p);

/// Detection rate in percent: detected / generated * 100.  Throws DomainError for generated = 0
/// or detected > generated.
double tder(std::size_t detected, std::size_t generated);

/// 2^-k under the uniform independent-bit model.  Throws DomainError for k = 0.
Dyadic analytic_probability(const trojan::TrojanSpec& spec);
Dyadic analytic_probability(unsigned k);

/// Free bits feeding the trigger: primary inputs and registers in its
/// combinational fan-in.  A leaf constrained only through direct slices
/// contributes just those bits.
struct ConeLeaf {
    std::string signal;
    unsigned width;      // number of free bits
    std::uint64_t mask;  // which bits of the signal are free
};
std::vector<ConeLeaf> trigger_cone(const rtl::Netlist& netlist, const trojan::TrojanSpec& spec);

/// Exact fraction of cone assignments that fire the trigger.  Throws
/// ConeTooLargeError beyond `max_bits` (24 by default).
Dyadic brute_force_probability(const rtl::Netlist& netlist, const trojan::TrojanSpec& spec, unsigned max_bits = 24);

struct MonteCarloEstimate {
    double estimate = 0;
    double lower = 0;  // Clopper-Pearson bounds
    double upper = 0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Two-sided exact binomial interval for `hits` out of `n`.
std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t n, double confidence = 0.95);

/// Uniform random cone assignments.  Throws DomainError below 1000 samples.
MonteCarloEstimate monte_carlo_probability(const rtl::Netlist& netlist, const trojan::TrojanSpec& spec,
                                           std::uint64_t samples, std::uint64_t seed);

struct TrojanRow {
    std::string id;
    std::string module;
    unsigned k = 0;
    Dyadic probability;
    double tpi = 0;
    bool detected = false;
    std::vector<std::string> detected_by;
    std::optional<std::string> error;
};

struct ModuleRow {
    std::string module;
    std::size_t source_assertions = 0;
    std::size_t translated = 0;
    double translation_pct = 0;
    std::size_t generated = 0;
    std::size_t detected = 0;
    std::optional<double> detection_pct;  // absent when no Trojans were generated
};

struct MetricsReport {
    std::uint64_t seed = 0;
    std::vector<ModuleRow> modules;
    std::vector<TrojanRow> trojans;
};

enum class Format { table, json, csv };
Format format_from_string(std::string_view s);
std::string_view to_string(Format f);

/// Scientific text with four significant digits, e.g. 1.250e-01.
std::string format_probability(const Dyadic& p);
std::string format_fixed(double v, int decimals);

std::string emit_report(const MetricsReport& report, Format format);
/// Reads the JSON form written by `emit_report`.  Throws ConfigError.
MetricsReport parse_report(std::string_view json_text);

}  // namespace svaport::metrics
