#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polymem/workloads.hpp"

namespace polymem {

/* One sweep cell: a body family, a structure built over it, and the measured
 * storage, query cost, and correctness counts. The family field is the body
 * tag and the structure tag joined by a dot. */
struct TradeoffRecord {
    std::string family;
    int d = 0;
    double eps = 0.0;
    double alpha = 0.0;  // 0 for structures that take none
    int t = 0;           // 0 likewise
    int64_t nodes = 0;
    int64_t sum_tq = 0;
    int64_t bytes = 0;
    double mean_tests = 0.0;
    int64_t max_tests = 0;
    int depth = 0;
    int64_t inside_ok = 0, inside_n = 0;
    int64_t far_ok = 0, far_n = 0;
    int64_t band_n = 0;
    double build_ms = 0.0;
    double query_us = 0.0;

    bool gate() const { return inside_ok == inside_n && far_ok == far_n; }
};

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

struct BenchConfig {
    std::vector<std::string> families = {"ball", "random-tangent"};
    std::vector<std::string> structures = {"splitreduce", "dudley", "bentley", "hybrid"};
    std::vector<int> ds = {2};
    std::vector<double> epses = {0.1, 0.05, 0.025};
    std::vector<double> alphas = {4.0};
    QueryCounts counts = {200, 200, 200};
    uint64_t seed = 1;
    int tangent_n = 64;  // facet count of the random-tangent family
    int threads = 0;     // 0 picks the hardware count
};

// Flat key = value lines, '#' comments, comma-separated lists. Unknown keys
// throw. Missing keys keep their defaults.
BenchConfig parse_config(std::istream& is);
BenchConfig parse_config_file(const std::string& path);

/* Runs every (family, d, structure, alpha, eps) cell of the config: builds
 * the body once per family instance, generates labeled queries per eps, and
 * measures each structure against them. Cells run on a worker pool; the
 * output order is the deterministic config order regardless of threads. */
std::vector<TradeoffRecord> sweep(const BenchConfig& cfg);

// Least squares of lg y against lg x. Needs >= 3 points, positive values,
// and at least two distinct x; throws otherwise.
ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// The fixed column order. Timing columns (build_ms, query_us) come last so
// the determinism view can drop them.
extern const char* const kTradeoffHeader;

std::string records_csv(const std::vector<TradeoffRecord>& recs);
std::vector<TradeoffRecord> read_records_csv(std::istream& is);

// The CSV minus its timing columns, for byte comparison across runs.
std::string strip_timing(const std::string& csv);

// True when every record accepted all inside queries and rejected all far
// ones. Band queries are free either way.
bool gates_pass(const std::vector<TradeoffRecord>& recs);

/* Per-group exponent fits of storage and query cost over the eps ladder,
 * lined up against the trade-off formulas the structures target, with a
 * warning line when a storage slope overshoots its formula by more than
 * half an exponent. */
std::string summary(const std::vector<TradeoffRecord>& recs);

}  // namespace polymem
