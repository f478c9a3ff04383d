#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psep/limit.hpp"

// Flat `section.key = value` run configuration. Lists are comma separated; `#` starts a
// comment. Unknown and duplicate keys are errors.
namespace psep::io {

// Parse or validation failure; what() lists every problem, one per line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct RunConfig {
    // geometry
    int dim = 1;
    double R = 0.0;                  // 0: 2 for dim 1, 1 otherwise
    double r0_seed = 0.0;            // 0: R/2
    int limit_nodes = 2001;

    // nonlinearity: odd polynomial sum_k c_k u^(2k+1); empty coeffs -> mu_f u - u^3
    std::vector<double> coeffs;
    double mu_f = 0.0;               // 0: 20, 40, 60 for dim 1, 2, 3

    // inner profiles
    double profile_L = 12.0;
    int profile_n = 2400;
    double profile_tol = 1e-10;

    // layer
    std::vector<double> eps_list{0.1, 0.05, 0.025};
    double alpha = 0.5;
    double d_fraction = 0.25;
    double b_tilde = 0.0;
    double zeta = 0.0;
    int layer_nodes = 4000;

    // estimate
    int ensemble = 32;
    std::uint64_t seed = 1;
    int m_max = 0;
    int threads = 1;

    // continuation
    std::vector<double> betas{1e4, 1e5, 1e6, 1e7, 1e8};
    int continuation_nodes = 4000;
    double continuation_tol = 1e-12;

    std::string out_dir;

    double domain_radius() const;
    double interface_seed() const;
    double forcing_scale() const;
    limit::Nonlinearity nonlinearity() const;

    // Every key with its resolved value, sorted by key.
    std::vector<std::pair<std::string, std::string>> snapshot() const;
    std::string snapshot_text() const;
};

// Throws ConfigError naming the line of every malformed, unknown or duplicate entry,
// then validates the result.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::string& path);

// Throws ConfigError listing every violated range.
void validate(const RunConfig& cfg);

// "0.1,0.05" -> {0.1, 0.05}; throws std::invalid_argument on a malformed entry.
std::vector<double> parse_number_list(std::string_view text);

// Shortest decimal that reads back to the same double ("inf", "-inf", "nan" otherwise).
std::string format_double(double x);

}  // namespace psep::io
