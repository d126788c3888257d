// twistlab command-line front end. Talks to the shared library exclusively
// through the C API in twistlab.h; owns configuration, caching policy, CSV
// emission and run manifests.

#include <twistlab.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// error handling: machine-readable record on stderr + documented exit codes
// (0 ok, 2 usage, 3 budget/coverage, 1 anything else)
// ---------------------------------------------------------------------------

const char* status_name(twistlab_status s) {
    switch (s) {
        case TWISTLAB_OK: return "ok";
        case TWISTLAB_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case TWISTLAB_ERR_UNSUPPORTED_FORM: return "unsupported-form";
        case TWISTLAB_ERR_COVERAGE: return "coverage";
        case TWISTLAB_ERR_BUDGET: return "budget";
        case TWISTLAB_ERR_QUADRATURE: return "quadrature";
        case TWISTLAB_ERR_INVARIANT: return "invariant";
        case TWISTLAB_ERR_IO: return "io";
        case TWISTLAB_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

int exit_code_for(twistlab_status s) {
    switch (s) {
        case TWISTLAB_OK: return 0;
        case TWISTLAB_ERR_INVALID_ARGUMENT:
        case TWISTLAB_ERR_UNSUPPORTED_FORM: return 2;
        case TWISTLAB_ERR_COVERAGE:
        case TWISTLAB_ERR_BUDGET: return 3;
        default: return 1;
    }
}

struct CliError {
    twistlab_status status;
    std::string message;
};

void check(twistlab_status s) {
    if (s != TWISTLAB_OK) throw CliError{s, twistlab_last_error()};
}

// RAII for C handles
template <class T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    ~Handle() {
        if (ptr) Free(ptr);
    }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};
using EigenHandle = Handle<twistlab_eigen, twistlab_eigen_free>;
using DiscsHandle = Handle<twistlab_discs, twistlab_discs_free>;
using WeightHandle = Handle<twistlab_weight, twistlab_weight_free>;

// ---------------------------------------------------------------------------
// shared run configuration + manifest
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string cache_dir;   // flag > TWISTLAB_CACHE_DIR > .twistlab-cache
    std::string csv_path;    // empty = stdout
    std::string manifest_path;
    int threads = 1;
    std::uint64_t seed = 1;

    std::string resolved_cache_dir() const {
        if (!cache_dir.empty()) return cache_dir;
        if (const char* env = std::getenv("TWISTLAB_CACHE_DIR"); env && *env) return env;
        return ".twistlab-cache";
    }
};

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--threads", cfg.threads, "worker thread count")->check(CLI::PositiveNumber);
    sub->add_option("--cache-dir", cfg.cache_dir, "table cache directory");
    sub->add_option("--csv", cfg.csv_path, "write the CSV here instead of stdout");
    sub->add_option("--seed", cfg.seed, "random seed for Monte-Carlo subcommands");
    sub->add_option("--manifest", cfg.manifest_path, "run manifest path override");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string config_digest(const json& config) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

class RunManifest {
public:
    RunManifest(const std::string& subcommand, const RunConfig& cfg, json config)
        : cfg_(cfg), start_(std::chrono::steady_clock::now()) {
        doc_["tool_version"] = twistlab_version();
        doc_["subcommand"] = subcommand;
        config["threads"] = cfg.threads;
        config["cache_dir"] = cfg.resolved_cache_dir();
        doc_["config"] = config;
        doc_["cache_digests"] = json::object();
        doc_["outputs"] = json::array();
        path_ = !cfg.manifest_path.empty() ? cfg.manifest_path
                : !cfg.csv_path.empty()
                    ? cfg.csv_path + ".manifest.json"
                    : cfg.resolved_cache_dir() + "/manifests/" + subcommand + "-" +
                          config_digest(config) + ".json";
    }

    const std::string& path() const { return path_; }

    void record_cache(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) return;
        std::uint64_t hash = 0xcbf29ce484222325ull;
        char buf[1 << 15];
        while (in.read(buf, sizeof buf) || in.gcount() > 0) {
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                hash ^= static_cast<unsigned char>(buf[i]);
                hash *= 0x100000001b3ull;
            }
            if (!in) break;
        }
        char hex[24];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
        doc_["cache_digests"][file] = hex;
    }

    void record_output(const std::string& file) { doc_["outputs"].push_back(file); }

    void write() {
        doc_["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const std::filesystem::path parent = std::filesystem::path(path_).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        std::ofstream out(path_, std::ios::trunc);
        out << doc_.dump(2) << "\n";
    }

private:
    const RunConfig& cfg_;
    json doc_;
    std::string path_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// CSV emission: header row, RFC-style quoting, trailing manifest comment
// ---------------------------------------------------------------------------

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// wall seconds are rounded to whole seconds in CSV output so identical runs
// are byte-identical; the precise timing lives in the manifest
std::string fmt_seconds(double seconds) {
    return std::to_string(static_cast<long long>(std::llround(seconds)));
}

class CsvWriter {
public:
    CsvWriter(const RunConfig& cfg, RunManifest& manifest) : manifest_(manifest) {
        if (!cfg.csv_path.empty()) {
            file_.open(cfg.csv_path, std::ios::trunc);
            if (!file_) throw CliError{TWISTLAB_ERR_IO, "cannot write " + cfg.csv_path};
            out_ = &file_;
            manifest_.record_output(cfg.csv_path);
        } else {
            out_ = &std::cout;
        }
    }

    void header(const std::vector<std::string>& names) { row(names); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) *out_ << ',';
            *out_ << csv_quote(fields[i]);
        }
        *out_ << '\n';
    }

    void finish() { *out_ << "# manifest: " << manifest_.path() << '\n'; }

private:
    RunManifest& manifest_;
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

// ---------------------------------------------------------------------------
// helpers shared by the subcommands
// ---------------------------------------------------------------------------

twistlab_family parse_family(const std::string& name) {
    if (name == "fundamental") return TWISTLAB_FAMILY_FUNDAMENTAL;
    if (name == "odd-squarefree") return TWISTLAB_FAMILY_ODD_SQUAREFREE;
    throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                   "family must be 'fundamental' or 'odd-squarefree' (got '" + name + "')"};
}

double weight_support_hi(const std::string& phi_spec) {
    double a = 0, b = 0;
    if (std::sscanf(phi_spec.c_str(), "bump:%lf,%lf", &a, &b) != 2 || !(a > 0) || !(a < b))
        throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                       "weight spec must be 'bump:a,b' with 0 < a < b (got '" + phi_spec + "')"};
    return b;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    if (values.empty())
        throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT, "empty grid '" + csv + "'"};
    return values;
}

double y_of_rule(const std::string& rule, double x) {
    double v = 0;
    if (std::sscanf(rule.c_str(), "pow:%lf", &v) == 1) return std::pow(x, v);
    if (std::sscanf(rule.c_str(), "fixed:%lf", &v) == 1) return v;
    throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                   "Y rule must be 'pow:E' or 'fixed:V' (got '" + rule + "')"};
}

std::uint64_t eigen_limit_for(twistlab_moment_kind kind, double y, double support_hi) {
    if (kind == TWISTLAB_MOMENT_S) return 0;
    const double hi = kind == TWISTLAB_MOMENT_T_SHARP ? y : support_hi * y;
    return static_cast<std::uint64_t>(std::max(1.0, std::floor(hi)));
}

EigenHandle cached_eigen(const RunConfig& cfg, RunManifest& manifest, std::uint64_t limit) {
    EigenHandle eigen;
    check(twistlab_eigen_cached(cfg.resolved_cache_dir().c_str(), 12, limit, eigen.out()));
    manifest.record_cache(cfg.resolved_cache_dir() + "/eigenvalues-weight12-limit" +
                          std::to_string(limit) + ".txt");
    return eigen;
}

DiscsHandle cached_discs(const RunConfig& cfg, RunManifest& manifest, double x,
                         twistlab_family family) {
    DiscsHandle discs;
    check(twistlab_discs_cached(cfg.resolved_cache_dir().c_str(), x, family, discs.out()));
    char bound[40];
    std::snprintf(bound, sizeof bound, "%.17g", x);
    manifest.record_cache(cfg.resolved_cache_dir() + "/sieve-" +
                          (family == TWISTLAB_FAMILY_FUNDAMENTAL ? "fundamental" : "odd-squarefree") +
                          "-x" + std::string(bound) + ".txt");
    return discs;
}

void write_plot_file(const std::string& csv_path, RunManifest& manifest,
                     const std::vector<std::pair<double, double>>& points) {
    if (csv_path.empty()) return;
    const std::string path = csv_path + ".plot.dat";
    std::ofstream out(path, std::ios::trunc);
    for (const auto& [x, y] : points) out << fmt_num(x) << ' ' << fmt_num(y) << '\n';
    manifest.record_output(path);
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_eigenvalues(const RunConfig& cfg, std::uint64_t limit, const std::string& out_path) {
    RunManifest manifest("eigenvalues", cfg, json{{"limit", limit}, {"out", out_path}});
    EigenHandle eigen = cached_eigen(cfg, manifest, limit);
    check(twistlab_eigen_save(eigen.get(), out_path.c_str()));
    manifest.record_output(out_path);
    manifest.write();
    std::cerr << "wrote " << out_path << " (limit " << limit << "), manifest " << manifest.path()
              << "\n";
    return 0;
}

int run_sieve(const RunConfig& cfg, double x, const std::string& family_name,
              const std::string& out_path) {
    const twistlab_family family = parse_family(family_name);
    RunManifest manifest("sieve", cfg, json{{"x", x}, {"family", family_name}, {"out", out_path}});
    DiscsHandle discs = cached_discs(cfg, manifest, x, family);
    check(twistlab_discs_save(discs.get(), out_path.c_str()));
    manifest.record_output(out_path);
    manifest.write();
    std::cerr << "wrote " << out_path << " (" << twistlab_discs_count(discs.get())
              << " discriminants), manifest " << manifest.path() << "\n";
    return 0;
}

int run_char_average(const RunConfig& cfg, std::uint64_t n, double x,
                     const std::string& family_name) {
    const twistlab_family family = parse_family(family_name);
    RunManifest manifest("char-average", cfg,
                         json{{"n", n}, {"x", x}, {"family", family_name}});
    const auto t0 = std::chrono::steady_clock::now();
    twistlab_char_average_report report{};
    check(twistlab_char_average(n, x, family, &report));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    CsvWriter csv(cfg, manifest);
    csv.header({"n", "X", "family", "computed", "main_term", "residual", "count", "seconds"});
    csv.row({std::to_string(report.n), fmt_num(report.x), family_name,
             fmt_num(report.computed_sum), fmt_num(report.main_term), fmt_num(report.residual),
             std::to_string(report.discriminants), fmt_seconds(seconds)});
    csv.finish();
    manifest.write();
    return 0;
}

std::vector<std::string> moment_row(const twistlab_moment_report& r,
                                    const std::string& family_name) {
    return {fmt_num(r.x),       fmt_num(r.y),     fmt_num(r.m),
            family_name,        fmt_num(r.moment), std::to_string(r.discriminants),
            fmt_num(r.predicted), fmt_num(r.ratio), fmt_seconds(r.seconds)};
}

int run_moments(const RunConfig& cfg, const std::string& kind_name, double m, double x, double y,
                const std::string& phi, const std::string& family_name) {
    twistlab_moment_kind kind = TWISTLAB_MOMENT_T;
    if (kind_name == "T") kind = TWISTLAB_MOMENT_T;
    else if (kind_name == "S") kind = TWISTLAB_MOMENT_S;
    else if (kind_name == "T-sharp") kind = TWISTLAB_MOMENT_T_SHARP;
    else
        throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                       "--kind must be T, S or T-sharp (got '" + kind_name + "')"};
    const twistlab_family family = parse_family(family_name);

    RunManifest manifest("moments", cfg,
                         json{{"kind", kind_name}, {"m", m}, {"x", x}, {"y", y},
                              {"phi", phi}, {"family", family_name}});

    WeightHandle weight;
    if (kind != TWISTLAB_MOMENT_T_SHARP) check(twistlab_weight_parse(phi.c_str(), weight.out()));

    EigenHandle eigen;
    if (kind != TWISTLAB_MOMENT_S) {
        const std::uint64_t limit =
            eigen_limit_for(kind, y, kind == TWISTLAB_MOMENT_T_SHARP ? 0 : weight_support_hi(phi));
        eigen = cached_eigen(cfg, manifest, limit);
    }
    DiscsHandle discs = cached_discs(cfg, manifest, x, family);

    twistlab_moment_report report{};
    check(twistlab_moment(kind, x, y, m, family, eigen.get(), weight.get(), discs.get(),
                          cfg.threads, &report));

    CsvWriter csv(cfg, manifest);
    csv.header({"X", "Y", "m", "family", "moment", "count", "predicted", "ratio", "seconds"});
    csv.row(moment_row(report, family_name));
    csv.finish();
    manifest.write();
    return 0;
}

int run_scan(const RunConfig& cfg, const std::string& kind_name, double m,
             const std::string& x_grid_spec, const std::string& y_rule,
             const std::string& phi, const std::string& family_name) {
    twistlab_moment_kind kind = TWISTLAB_MOMENT_T;
    if (kind_name == "T") kind = TWISTLAB_MOMENT_T;
    else if (kind_name == "S") kind = TWISTLAB_MOMENT_S;
    else if (kind_name == "T-sharp") kind = TWISTLAB_MOMENT_T_SHARP;
    else
        throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                       "--kind must be T, S or T-sharp (got '" + kind_name + "')"};
    const twistlab_family family = parse_family(family_name);
    const std::vector<double> x_grid = parse_grid(x_grid_spec);

    RunManifest manifest("scan", cfg,
                         json{{"kind", kind_name}, {"m", m}, {"x_grid", x_grid_spec},
                              {"y_rule", y_rule}, {"phi", phi}, {"family", family_name}});

    WeightHandle weight;
    if (kind != TWISTLAB_MOMENT_T_SHARP) check(twistlab_weight_parse(phi.c_str(), weight.out()));

    std::uint64_t limit = 1;
    for (const double x : x_grid)
        limit = std::max(limit, eigen_limit_for(kind, y_of_rule(y_rule, x),
                                                kind == TWISTLAB_MOMENT_T_SHARP
                                                    ? 0
                                                    : weight_support_hi(phi)));
    EigenHandle eigen;
    if (kind != TWISTLAB_MOMENT_S) eigen = cached_eigen(cfg, manifest, limit);

    CsvWriter csv(cfg, manifest);
    csv.header({"X", "Y", "m", "family", "moment", "count", "predicted", "ratio", "seconds"});
    std::vector<std::pair<double, double>> plot;
    for (const double x : x_grid) {
        const double y = y_of_rule(y_rule, x);
        DiscsHandle discs = cached_discs(cfg, manifest, x, family);
        twistlab_moment_report report{};
        check(twistlab_moment(kind, x, y, m, family, eigen.get(), weight.get(), discs.get(),
                              cfg.threads, &report));
        csv.row(moment_row(report, family_name));
        plot.emplace_back(x, report.ratio);
    }
    csv.finish();
    write_plot_file(cfg.csv_path, manifest, plot);
    manifest.write();
    return 0;
}

int run_holder(const RunConfig& cfg, int m, double x, double y, double epsilon,
               const std::string& phi, const std::string& family_name) {
    const twistlab_family family = parse_family(family_name);
    RunManifest manifest("holder", cfg,
                         json{{"m", m}, {"x", x}, {"y", y}, {"epsilon", epsilon},
                              {"phi", phi}, {"family", family_name}});

    WeightHandle weight;
    check(twistlab_weight_parse(phi.c_str(), weight.out()));
    const std::uint64_t limit =
        eigen_limit_for(TWISTLAB_MOMENT_T, y, weight_support_hi(phi));
    EigenHandle eigen = cached_eigen(cfg, manifest, limit);
    DiscsHandle discs = cached_discs(cfg, manifest, x, family);

    const auto t0 = std::chrono::steady_clock::now();
    twistlab_holder_report report{};
    check(twistlab_holder(x, y, m, epsilon, family, eigen.get(), weight.get(), discs.get(),
                          cfg.threads, &report));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double lhs = std::pow(std::abs(report.h1), m);
    const double rhs = std::pow(report.h2, m - 1) * report.tm;
    CsvWriter csv(cfg, manifest);
    csv.header({"X", "Y", "m", "epsilon", "family", "H1", "H2", "Tm", "lhs", "rhs", "slack",
                "seconds"});
    csv.row({fmt_num(x), fmt_num(y), std::to_string(m), fmt_num(epsilon), family_name,
             fmt_num(report.h1), fmt_num(report.h2), fmt_num(report.tm), fmt_num(lhs),
             fmt_num(rhs), fmt_num(report.slack), fmt_seconds(seconds)});
    csv.finish();
    manifest.write();
    return 0;
}

int run_verify_euler(const RunConfig& cfg, int m, std::uint64_t p_max, int degree) {
    RunManifest manifest("verify-euler", cfg,
                         json{{"m", m}, {"pmax", p_max}, {"degree", degree}});
    EigenHandle eigen = cached_eigen(cfg, manifest, std::max<std::uint64_t>(p_max, 16));

    const auto t0 = std::chrono::steady_clock::now();
    double discrepancy = 0;
    check(twistlab_verify_factorization(p_max, m, degree, eigen.get(), &discrepancy));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    CsvWriter csv(cfg, manifest);
    csv.header({"m", "p_max", "degree", "max_discrepancy", "seconds"});
    csv.row({std::to_string(m), std::to_string(p_max), std::to_string(degree),
             fmt_num(discrepancy), fmt_seconds(seconds)});
    csv.finish();
    manifest.write();
    return 0;
}

int run_pf(const RunConfig& cfg, int m, const std::string& beta_spec, double y,
           const std::string& y_grid_spec, bool plus, std::uint64_t budget,
           const std::string& phi) {
    std::vector<double> beta;
    if (!beta_spec.empty()) {
        beta = parse_grid(beta_spec);
        if (m != 0 && m != static_cast<int>(beta.size()))
            throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT,
                           "--m disagrees with the number of --beta entries"};
    } else {
        if (m <= 0)
            throw CliError{TWISTLAB_ERR_INVALID_ARGUMENT, "pf needs --m or an explicit --beta"};
        beta.assign(m, 1.0);
    }
    const int arity = static_cast<int>(beta.size());
    double beta_max = 0;
    for (const double b : beta) beta_max = std::max(beta_max, b);

    RunManifest manifest("pf", cfg,
                         json{{"m", arity}, {"beta", beta}, {"y", y}, {"y_grid", y_grid_spec},
                              {"plus", plus}, {"budget", budget}, {"phi", phi}});

    WeightHandle weight;
    check(twistlab_weight_parse(phi.c_str(), weight.out()));
    const double support_hi = weight_support_hi(phi);

    const std::vector<double> y_grid =
        y_grid_spec.empty() ? std::vector<double>{y} : parse_grid(y_grid_spec);
    std::uint64_t limit = 1;
    for (const double yy : y_grid)
        limit = std::max(limit, static_cast<std::uint64_t>(
                                    std::max(1.0, std::floor(support_hi * std::pow(yy, beta_max)))));
    EigenHandle eigen = cached_eigen(cfg, manifest, limit);

    const double log_exponent = 0.5 * arity * (arity - 3);
    CsvWriter csv(cfg, manifest);
    csv.header({"m", "Y", "beta", "plus", "value", "envelope", "ratio", "tuples", "nodes",
                "seconds"});
    std::vector<std::pair<double, double>> plot;
    std::string beta_str;
    for (std::size_t i = 0; i < beta.size(); ++i)
        beta_str += (i ? "," : "") + fmt_num(beta[i]);

    for (const double yy : y_grid) {
        const auto t0 = std::chrono::steady_clock::now();
        twistlab_pf_report report{};
        check(twistlab_pf(beta.data(), arity, yy, eigen.get(), weight.get(), plus ? 1 : 0,
                          budget, cfg.threads, &report));
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double beta_sum = 0;
        for (const double b : beta) beta_sum += b;
        const double envelope =
            std::pow(yy, 0.5 * beta_sum) * std::pow(std::log(yy), log_exponent);
        const double ratio = report.value / envelope;
        csv.row({std::to_string(arity), fmt_num(yy), beta_str, plus ? "1" : "0",
                 fmt_num(report.value), fmt_num(envelope), fmt_num(ratio),
                 std::to_string(report.tuples), std::to_string(report.nodes),
                 fmt_seconds(seconds)});
        plot.emplace_back(yy, ratio);
    }
    csv.finish();
    if (y_grid.size() > 1) write_plot_file(cfg.csv_path, manifest, plot);
    manifest.write();
    return 0;
}

int run_kernels(const RunConfig& cfg, int m, int region, double x, double b,
                const std::string& b_grid_spec, std::uint64_t samples) {
    RunManifest manifest("kernels", cfg,
                         json{{"m", m}, {"k", region}, {"x", x}, {"b", b},
                              {"b_grid", b_grid_spec}, {"samples", samples}, {"seed", cfg.seed}});

    const std::vector<double> b_grid =
        b_grid_spec.empty() ? std::vector<double>{b} : parse_grid(b_grid_spec);
    const double log_exponent = 0.5 * m * (m - 3);

    CsvWriter csv(cfg, manifest);
    csv.header({"m", "region", "X", "B", "samples", "seed", "estimate", "std_error", "envelope",
                "ratio", "seconds"});
    std::vector<std::pair<double, double>> plot;
    for (const double bb : b_grid) {
        const auto t0 = std::chrono::steady_clock::now();
        twistlab_mc_estimate est{};
        check(twistlab_region_integral(m, region, x, bb, samples, cfg.seed, cfg.threads, &est));
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double envelope = (region == 3 ? bb * bb : 1.0) * std::pow(std::log(x), log_exponent);
        const double ratio = est.value / envelope;
        csv.row({std::to_string(m), std::to_string(region), fmt_num(x), fmt_num(bb),
                 std::to_string(samples), std::to_string(cfg.seed), fmt_num(est.value),
                 fmt_num(est.std_error), fmt_num(envelope), fmt_num(ratio),
                 fmt_seconds(seconds)});
        plot.emplace_back(bb, ratio);
    }
    csv.finish();
    if (b_grid.size() > 1) write_plot_file(cfg.csv_path, manifest, plot);
    manifest.write();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistlab: quadratic-twist character sums, Hecke eigenvalue moments, "
                 "Euler factorizations and kernel integrals"};
    app.require_subcommand(1);

    RunConfig cfg;

    // eigenvalues
    std::uint64_t eig_limit = 1000;
    std::string eig_out = "eigenvalues.txt";
    auto* eig = app.add_subcommand("eigenvalues", "build/cache exact Fourier coefficients");
    eig->add_option("--limit", eig_limit, "table limit N")->required();
    eig->add_option("--out", eig_out, "output path")->required();
    add_common_options(eig, cfg);

    // sieve
    double sieve_x = 100;
    std::string sieve_family = "fundamental", sieve_out = "discriminants.txt";
    auto* sv = app.add_subcommand("sieve", "enumerate the discriminant family up to X");
    sv->add_option("--x", sieve_x, "upper bound X")->required();
    sv->add_option("--family", sieve_family, "fundamental | odd-squarefree");
    sv->add_option("--out", sieve_out, "output path")->required();
    add_common_options(sv, cfg);

    // char-average
    std::uint64_t ca_n = 1;
    double ca_x = 1e4;
    std::string ca_family = "fundamental";
    auto* ca = app.add_subcommand("char-average", "average of chi_d(n) over the family");
    ca->add_option("--n", ca_n, "character argument n")->required();
    ca->add_option("--x", ca_x, "family bound X")->required();
    ca->add_option("--family", ca_family, "fundamental | odd-squarefree");
    add_common_options(ca, cfg);

    // moments
    std::string mo_kind = "T", mo_phi = "bump:1,2", mo_family = "fundamental";
    double mo_m = 2, mo_x = 1e4, mo_y = 100;
    auto* mo = app.add_subcommand("moments", "moments of (twisted) character sums");
    mo->add_option("--kind", mo_kind, "T | S | T-sharp");
    mo->add_option("--m", mo_m, "moment order m >= 0")->required();
    mo->add_option("--x", mo_x, "discriminant bound X")->required();
    mo->add_option("--y", mo_y, "inner sum length Y")->required();
    mo->add_option("--phi", mo_phi, "weight spec, e.g. bump:1,2");
    mo->add_option("--family", mo_family, "fundamental | odd-squarefree");
    add_common_options(mo, cfg);

    // scan
    std::string sc_kind = "T", sc_grid, sc_rule = "pow:0.5", sc_phi = "bump:1,2",
                sc_family = "fundamental";
    double sc_m = 4;
    auto* sc = app.add_subcommand("scan", "moment scan over an X grid");
    sc->add_option("--kind", sc_kind, "T | S | T-sharp");
    sc->add_option("--m", sc_m, "moment order")->required();
    sc->add_option("--x-grid", sc_grid, "comma-separated X values")->required();
    sc->add_option("--y-rule", sc_rule, "pow:E (Y = X^E) or fixed:V");
    sc->add_option("--phi", sc_phi, "weight spec");
    sc->add_option("--family", sc_family, "fundamental | odd-squarefree");
    add_common_options(sc, cfg);

    // holder
    int ho_m = 4;
    double ho_x = 1e3, ho_y = 1e2, ho_eps = 0.3;
    std::string ho_phi = "bump:1,2", ho_family = "fundamental";
    auto* ho = app.add_subcommand("holder", "Holder lower-bound machinery");
    ho->add_option("--m", ho_m, "even moment order m >= 4")->required();
    ho->add_option("--x", ho_x, "discriminant bound X")->required();
    ho->add_option("--y", ho_y, "inner sum length Y")->required();
    ho->add_option("--epsilon", ho_eps, "epsilon in (0,1)")->required();
    ho->add_option("--phi", ho_phi, "weight spec");
    ho->add_option("--family", ho_family, "fundamental | odd-squarefree");
    add_common_options(ho, cfg);

    // verify-euler
    int ve_m = 4, ve_degree = 6;
    std::uint64_t ve_pmax = 50;
    auto* ve = app.add_subcommand("verify-euler", "local Euler factorization check");
    ve->add_option("--m", ve_m, "arity")->required();
    ve->add_option("--pmax", ve_pmax, "largest prime")->required();
    ve->add_option("--degree", ve_degree, "series degree cap")->required();
    add_common_options(ve, cfg);

    // pf
    int pf_m = 0;
    std::string pf_beta, pf_ygrid, pf_phi = "bump:1,2";
    double pf_y = 10;
    bool pf_plus = false;
    std::uint64_t pf_budget = 50000000;
    auto* pf = app.add_subcommand("pf", "brute-force square-product sums P_f");
    pf->add_option("--m", pf_m, "arity (beta defaults to all ones)");
    pf->add_option("--beta", pf_beta, "comma-separated exponents beta_i");
    pf->add_option("--y", pf_y, "base Y");
    pf->add_option("--y-grid", pf_ygrid, "comma-separated Y values (growth diagnostic)");
    pf->add_flag("--plus", pf_plus, "use |lambda| (the plus variant)");
    pf->add_option("--budget", pf_budget, "enumeration node budget");
    pf->add_option("--phi", pf_phi, "weight spec");
    add_common_options(pf, cfg);

    // kernels
    int ke_m = 4, ke_k = 1;
    double ke_x = 1e6, ke_b = 10;
    std::string ke_bgrid;
    std::uint64_t ke_samples = 100000;
    auto* ke = app.add_subcommand("kernels", "Monte-Carlo kernel region integrals");
    ke->add_option("--m", ke_m, "arity")->required();
    ke->add_option("--k", ke_k, "region index 1|2|3")->required();
    ke->add_option("--x", ke_x, "kernel parameter X")->required();
    ke->add_option("--b", ke_b, "region-3 right endpoint B");
    ke->add_option("--b-grid", ke_bgrid, "comma-separated B values (region-3 scan)");
    ke->add_option("--samples", ke_samples, "Monte-Carlo samples");
    add_common_options(ke, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 2;  // usage error
    }

    std::string subcommand;
    try {
        if (eig->parsed()) { subcommand = "eigenvalues"; return run_eigenvalues(cfg, eig_limit, eig_out); }
        if (sv->parsed()) { subcommand = "sieve"; return run_sieve(cfg, sieve_x, sieve_family, sieve_out); }
        if (ca->parsed()) { subcommand = "char-average"; return run_char_average(cfg, ca_n, ca_x, ca_family); }
        if (mo->parsed()) { subcommand = "moments"; return run_moments(cfg, mo_kind, mo_m, mo_x, mo_y, mo_phi, mo_family); }
        if (sc->parsed()) { subcommand = "scan"; return run_scan(cfg, sc_kind, sc_m, sc_grid, sc_rule, sc_phi, sc_family); }
        if (ho->parsed()) { subcommand = "holder"; return run_holder(cfg, ho_m, ho_x, ho_y, ho_eps, ho_phi, ho_family); }
        if (ve->parsed()) { subcommand = "verify-euler"; return run_verify_euler(cfg, ve_m, ve_pmax, ve_degree); }
        if (pf->parsed()) { subcommand = "pf"; return run_pf(cfg, pf_m, pf_beta, pf_y, pf_ygrid, pf_plus, pf_budget, pf_phi); }
        if (ke->parsed()) { subcommand = "kernels"; return run_kernels(cfg, ke_m, ke_k, ke_x, ke_b, ke_bgrid, ke_samples); }
    } catch (const CliError& e) {
        const json record{{"error", status_name(e.status)}, {"message", e.message},
                          {"subcommand", subcommand}};
        std::cerr << record.dump() << "\n";
        return exit_code_for(e.status);
    } catch (const std::exception& e) {
        const json record{{"error", "internal"}, {"message", e.what()},
                          {"subcommand", subcommand}};
        std::cerr << record.dump() << "\n";
        return 1;
    }
    return 2;
}
