#pragma once

#include <cstdint>
#include <string>

#include "characters.hpp"
#include "eigenvalues.hpp"

namespace twistlab {

// Flags override the environment; TWISTLAB_CACHE_DIR overrides this default.
std::string default_cache_dir();

// Plain-text formats, exact and auditable:
//   eigenvalues: "# form=delta weight=12 limit=N" then one "n<TAB>a(n)" line per n
//   discriminants: "# fundamental X=..." (or "# odd-squarefree X=...") then one d per line
//   spf: "# spf limit=N" then one "n<TAB>spf(n)" line per n >= 2
void save_eigen_table(const EigenvalueTable& table, const std::string& path);
EigenvalueTable load_eigen_table(const std::string& path);  // raw only; not normalized

void save_discriminants(const DiscriminantSet& set, const std::string& path);
DiscriminantSet load_discriminants(const std::string& path);

void save_spf(const SpfSieve& sieve, const std::string& path);
SpfSieve load_spf(const std::string& path);

// Load a validated cached table (header parameters must match) or build and
// persist it. Corrupt or mismatched caches are rebuilt with a warning; cached
// and fresh results are identical. The returned eigen table is normalized.
EigenvalueTable cached_eigen_table(const std::string& cache_dir, int weight, std::uint64_t limit,
                                   bool* rebuilt = nullptr);
DiscriminantSet cached_discriminants(const std::string& cache_dir, double x, Family family,
                                     bool* rebuilt = nullptr);
SpfSieve cached_spf(const std::string& cache_dir, std::uint64_t limit, bool* rebuilt = nullptr);

std::string eigen_cache_path(const std::string& cache_dir, int weight, std::uint64_t limit);
std::string discriminant_cache_path(const std::string& cache_dir, double x, Family family);
std::string spf_cache_path(const std::string& cache_dir, std::uint64_t limit);

// FNV-1a digest of a file's bytes, as a hex string; used in run manifests.
std::string file_digest_hex(const std::string& path);

}  // namespace twistlab
