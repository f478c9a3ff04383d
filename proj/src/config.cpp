#include "psep/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace psep::io {

namespace {

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += '\n';
        s += x;
    }
    return s;
}

std::string_view trim(std::string_view s)
{
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

double to_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw std::invalid_argument("not a finite number: '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int to_int(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    Int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    return v;
}

std::string list_text(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

struct Key {
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key number_key(T RunConfig::*m)
{
    Key k;
    k.set = [m](RunConfig& c, std::string_view v) {
        if constexpr (std::is_floating_point_v<T>)
            c.*m = to_double(v);
        else
            c.*m = to_int<T>(v);
    };
    k.get = [m](const RunConfig& c) {
        if constexpr (std::is_floating_point_v<T>)
            return format_double(c.*m);
        else
            return std::to_string(c.*m);
    };
    return k;
}

Key list_key(std::vector<double> RunConfig::*m)
{
    return {[m](RunConfig& c, std::string_view v) { c.*m = parse_number_list(v); },
            [m](const RunConfig& c) { return list_text(c.*m); }};
}

const std::map<std::string, Key, std::less<>>& keys()
{
    static const std::map<std::string, Key, std::less<>> table = [] {
        std::map<std::string, Key, std::less<>> t;
        t["geometry.dim"] = number_key(&RunConfig::dim);
        t["geometry.R"] = {[](RunConfig& c, std::string_view v) { c.R = to_double(v); },
                           [](const RunConfig& c) { return format_double(c.domain_radius()); }};
        t["geometry.r0_seed"] = {[](RunConfig& c, std::string_view v) { c.r0_seed = to_double(v); },
                                 [](const RunConfig& c) { return format_double(c.interface_seed()); }};
        t["geometry.nodes"] = number_key(&RunConfig::limit_nodes);
        t["nonlinearity.coeffs"] = list_key(&RunConfig::coeffs);
        t["nonlinearity.mu_f"] = {[](RunConfig& c, std::string_view v) { c.mu_f = to_double(v); },
                                  [](const RunConfig& c) { return format_double(c.forcing_scale()); }};
        t["profile.L"] = number_key(&RunConfig::profile_L);
        t["profile.n"] = number_key(&RunConfig::profile_n);
        t["profile.tol"] = number_key(&RunConfig::profile_tol);
        t["layer.eps_list"] = list_key(&RunConfig::eps_list);
        t["layer.alpha"] = number_key(&RunConfig::alpha);
        t["layer.d_fraction"] = number_key(&RunConfig::d_fraction);
        t["layer.b_tilde"] = number_key(&RunConfig::b_tilde);
        t["layer.zeta"] = number_key(&RunConfig::zeta);
        t["layer.nodes"] = number_key(&RunConfig::layer_nodes);
        t["estimate.ensemble"] = number_key(&RunConfig::ensemble);
        t["estimate.seed"] = number_key(&RunConfig::seed);
        t["estimate.m_max"] = number_key(&RunConfig::m_max);
        t["estimate.threads"] = number_key(&RunConfig::threads);
        t["continuation.betas"] = list_key(&RunConfig::betas);
        t["continuation.nodes"] = number_key(&RunConfig::continuation_nodes);
        t["continuation.tol"] = number_key(&RunConfig::continuation_tol);
        t["output.dir"] = {[](RunConfig& c, std::string_view v) { c.out_dir = std::string(trim(v)); },
                           [](const RunConfig& c) { return c.out_dir; }};
        return t;
    }();
    return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems))
{
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(to_double(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double RunConfig::domain_radius() const { return R > 0.0 ? R : (dim == 1 ? 2.0 : 1.0); }
double RunConfig::interface_seed() const { return r0_seed > 0.0 ? r0_seed : 0.5 * domain_radius(); }
double RunConfig::forcing_scale() const
{
    if (mu_f > 0.0) return mu_f;
    return dim == 1 ? 20.0 : (dim == 2 ? 40.0 : 60.0);
}

limit::Nonlinearity RunConfig::nonlinearity() const
{
    if (coeffs.empty()) return limit::Nonlinearity::cubic(forcing_scale());
    limit::Nonlinearity f;
    f.coeffs = coeffs;
    return f;
}

std::vector<std::pair<std::string, std::string>> RunConfig::snapshot() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, key] : keys()) out.emplace_back(name, key.get(*this));
    return out;
}

std::string RunConfig::snapshot_text() const
{
    std::string s;
    for (const auto& [k, v] : snapshot()) s += k + " = " + v + "\n";
    return s;
}

void validate(const RunConfig& c)
{
    std::vector<std::string> bad;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    need(c.dim >= 1 && c.dim <= 3, "geometry.dim must be 1, 2 or 3 (got " + std::to_string(c.dim) + ")");
    const double R = c.domain_radius();
    need(R > 0.0, "geometry.R must be positive");
    need(c.interface_seed() > 0.0 && c.interface_seed() < R, "geometry.r0_seed must lie in (0, R)");
    need(c.limit_nodes >= 16, "geometry.nodes must be at least 16");
    need(c.forcing_scale() > 0.0, "nonlinearity.mu_f must be positive");
    need(c.profile_L >= 4.0, "profile.L must be at least 4");
    need(c.profile_n >= 16 && c.profile_n % 2 == 0, "profile.n must be an even number >= 16");
    need(c.profile_tol > 0.0, "profile.tol must be positive");
    need(!c.eps_list.empty(), "layer.eps_list must not be empty");
    for (double e : c.eps_list)
        need(e > 0.0 && e <= 0.2, "layer.eps_list entries must lie in (0, 0.2] (got " + format_double(e) + ")");
    need(c.alpha > 0.0 && c.alpha < 1.0, "layer.alpha must lie in (0, 1) (got " + format_double(c.alpha) + ")");
    need(c.d_fraction > 0.0 && c.d_fraction <= 0.5, "layer.d_fraction must lie in (0, 0.5]");
    need(std::fabs(c.b_tilde) <= 10.0 && std::fabs(c.zeta) <= 10.0, "layer.b_tilde and layer.zeta must lie in [-10, 10]");
    need(c.layer_nodes >= 16, "layer.nodes must be at least 16");
    need(c.ensemble >= 1, "estimate.ensemble must be positive");
    need(c.m_max >= 0, "estimate.m_max must be nonnegative");
    need(c.dim != 1 || c.m_max == 0, "estimate.m_max must be 0 when geometry.dim = 1");
    need(c.threads >= 1, "estimate.threads must be positive");
    need(!c.betas.empty(), "continuation.betas must not be empty");
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
        need(c.betas[i] > 0.0, "continuation.betas entries must be positive");
        if (i > 0) need(c.betas[i] > c.betas[i - 1], "continuation.betas must be strictly increasing");
    }
    need(c.continuation_nodes >= 16, "continuation.nodes must be at least 16");
    need(c.continuation_tol > 0.0, "continuation.tol must be positive");
    if (!bad.empty()) throw ConfigError(std::move(bad));
}

RunConfig parse_config(std::string_view text, std::string_view source)
{
    RunConfig cfg;
    std::vector<std::string> bad;
    std::map<std::string, int, std::less<>> seen;
    const std::string src(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = src + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            bad.push_back(where + "expected 'section.key = value'");
            continue;
        }
        const std::string_view name = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = keys().find(name);
        if (it == keys().end()) {
            bad.push_back(where + "unknown key '" + std::string(name) + "'");
            continue;
        }
        if (auto prev = seen.find(name); prev != seen.end()) {
            bad.push_back(where + "duplicate key '" + std::string(name) + "' (first set on line " +
                          std::to_string(prev->second) + ")");
            continue;
        }
        seen.emplace(std::string(name), line_no);
        try {
            it->second.set(cfg, value);
        } catch (const std::exception& e) {
            bad.push_back(where + std::string(name) + ": " + e.what());
        }
    }
    if (!bad.empty()) throw ConfigError(std::move(bad));
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path);
}

}  // namespace psep::io
