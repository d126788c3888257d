#include "cache.hpp"

#include <unistd.h>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "error.hpp"

namespace twistlab {

namespace fs = std::filesystem;

std::string default_cache_dir() {
    if (const char* env = std::getenv("TWISTLAB_CACHE_DIR"); env && *env) return env;
    return ".twistlab-cache";
}

namespace {

std::string format_bound(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

// write-to-temp-then-rename keeps concurrent builders from seeing torn files
class AtomicWriter {
public:
    explicit AtomicWriter(const std::string& path)
        : path_(path), tmp_(path + ".tmp." + std::to_string(::getpid())) {
        ensure_parent_dir(path);
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) fail(ErrorCode::Io, "cannot write " + tmp_);
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) fail(ErrorCode::Io, "write failure on " + tmp_);
        out_.close();
        std::error_code ec;
        fs::rename(tmp_, path_, ec);
        if (ec) fail(ErrorCode::Io, "cannot rename " + tmp_ + " -> " + path_);
    }
    ~AtomicWriter() {
        if (out_.is_open()) out_.close();
        std::error_code ec;
        fs::remove(tmp_, ec);
    }

private:
    std::string path_, tmp_;
    std::ofstream out_;
};

}  // namespace

std::string eigen_cache_path(const std::string& cache_dir, int weight, std::uint64_t limit) {
    return cache_dir + "/eigenvalues-weight" + std::to_string(weight) + "-limit" +
           std::to_string(limit) + ".txt";
}

std::string discriminant_cache_path(const std::string& cache_dir, double x, Family family) {
    return cache_dir + "/sieve-" + family_name(family) + "-x" + format_bound(x) + ".txt";
}

std::string spf_cache_path(const std::string& cache_dir, std::uint64_t limit) {
    return cache_dir + "/spf-limit" + std::to_string(limit) + ".txt";
}

void save_eigen_table(const EigenvalueTable& table, const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "# form=delta weight=" << table.weight << " limit=" << table.limit << "\n";
    for (std::uint64_t n = 1; n <= table.limit; ++n)
        out << n << '\t' << table.raw[n] << '\n';
    writer.commit();
}

EigenvalueTable load_eigen_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) fail(ErrorCode::Io, "empty cache file " + path);

    int weight = 0;
    unsigned long long limit = 0;
    if (std::sscanf(header.c_str(), "# form=delta weight=%d limit=%llu", &weight, &limit) != 2)
        fail(ErrorCode::Io, "bad eigenvalue cache header in " + path + ": '" + header + "'");

    EigenvalueTable table;
    table.weight = weight;
    table.limit = limit;
    table.raw.resize(limit + 1);
    std::uint64_t expected = 1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::uint64_t n = 0;
        mpz_class a;
        if (!(row >> n >> a) || n != expected || n > limit)
            fail(ErrorCode::Io, "corrupt eigenvalue cache line in " + path + ": '" + line + "'");
        table.raw[n] = a;
        ++expected;
    }
    if (expected != limit + 1)
        fail(ErrorCode::Io, "truncated eigenvalue cache " + path + " (" +
                                std::to_string(expected - 1) + " of " + std::to_string(limit) +
                                " rows)");
    return table;
}

void save_discriminants(const DiscriminantSet& set, const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "# " << family_name(set.family) << " X=" << format_bound(set.bound) << "\n";
    for (const std::int64_t d : set.values) out << d << '\n';
    writer.commit();
}

DiscriminantSet load_discriminants(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) fail(ErrorCode::Io, "empty cache file " + path);

    char family_buf[32] = {0};
    char bound_buf[40] = {0};
    if (std::sscanf(header.c_str(), "# %31s X=%39s", family_buf, bound_buf) != 2)
        fail(ErrorCode::Io, "bad sieve cache header in " + path + ": '" + header + "'");

    DiscriminantSet set;
    set.family = family_from_name(family_buf);
    set.bound = std::strtod(bound_buf, nullptr);

    std::string line;
    std::int64_t prev = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        char* end = nullptr;
        const long long d = std::strtoll(line.c_str(), &end, 10);
        if (end == line.c_str() || d <= prev)
            fail(ErrorCode::Io, "corrupt sieve cache line in " + path + ": '" + line + "'");
        set.values.push_back(d);
        prev = d;
    }
    return set;
}

void save_spf(const SpfSieve& sieve, const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "# spf limit=" << sieve.limit << "\n";
    for (std::uint64_t n = 2; n <= sieve.limit; ++n) out << n << '\t' << sieve.spf[n] << '\n';
    writer.commit();
}

SpfSieve load_spf(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) fail(ErrorCode::Io, "empty cache file " + path);
    unsigned long long limit = 0;
    if (std::sscanf(header.c_str(), "# spf limit=%llu", &limit) != 1)
        fail(ErrorCode::Io, "bad spf cache header in " + path + ": '" + header + "'");

    SpfSieve sieve;
    sieve.limit = limit;
    sieve.spf.assign(limit + 1, 0);
    std::string line;
    std::uint64_t expected = 2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint64_t n = 0, p = 0;
        if (std::sscanf(line.c_str(), "%" SCNu64 "\t%" SCNu64, &n, &p) != 2 || n != expected ||
            n > limit || p < 2 || p > n)
            fail(ErrorCode::Io, "corrupt spf cache line in " + path + ": '" + line + "'");
        sieve.spf[n] = static_cast<std::uint32_t>(p);
        if (p == n) sieve.primes.push_back(static_cast<std::uint32_t>(p));
        ++expected;
    }
    if (limit >= 2 && expected != limit + 1)
        fail(ErrorCode::Io, "truncated spf cache " + path);
    return sieve;
}

namespace {

template <class Table, class Load, class Build, class Save, class Validate>
Table get_or_build(const std::string& path, bool* rebuilt, Load&& load, Build&& build,
                   Save&& save, Validate&& validate) {
    if (rebuilt) *rebuilt = true;
    if (fs::exists(path)) {
        try {
            Table table = load(path);
            validate(table);
            if (rebuilt) *rebuilt = false;
            return table;
        } catch (const Error& e) {
            std::cerr << "twistlab: cache " << path << " is unusable (" << e.what()
                      << "); rebuilding\n";
        }
    }
    Table table = build();
    save(table, path);
    return table;
}

}  // namespace

EigenvalueTable cached_eigen_table(const std::string& cache_dir, int weight, std::uint64_t limit,
                                   bool* rebuilt) {
    const std::string path = eigen_cache_path(cache_dir, weight, limit);
    EigenvalueTable table = get_or_build<EigenvalueTable>(
        path, rebuilt, load_eigen_table,
        [&] { return build_integer_coefficients(weight, limit); },
        [](const EigenvalueTable& t, const std::string& p) { save_eigen_table(t, p); },
        [&](const EigenvalueTable& t) {
            if (t.weight != weight || t.limit != limit)
                fail(ErrorCode::Io, "cache header mismatch (weight/limit)");
        });
    normalize(table);
    return table;
}

DiscriminantSet cached_discriminants(const std::string& cache_dir, double x, Family family,
                                     bool* rebuilt) {
    const std::string path = discriminant_cache_path(cache_dir, x, family);
    return get_or_build<DiscriminantSet>(
        path, rebuilt, load_discriminants, [&] { return sieve_discriminants(x, family); },
        [](const DiscriminantSet& s, const std::string& p) { save_discriminants(s, p); },
        [&](const DiscriminantSet& s) {
            if (s.family != family || format_bound(s.bound) != format_bound(x))
                fail(ErrorCode::Io, "cache header mismatch (family/bound)");
        });
}

SpfSieve cached_spf(const std::string& cache_dir, std::uint64_t limit, bool* rebuilt) {
    const std::string path = spf_cache_path(cache_dir, limit);
    return get_or_build<SpfSieve>(
        path, rebuilt, load_spf, [&] { return build_spf(limit); },
        [](const SpfSieve& s, const std::string& p) { save_spf(s, p); },
        [&](const SpfSieve& s) {
            if (s.limit != limit) fail(ErrorCode::Io, "cache header mismatch (limit)");
        });
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path + " for digest");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, hash);
    return hex;
}

}  // namespace twistlab
