#include "polymem/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polymem/splitreduce.hpp"

namespace polymem {

const char* const kTradeoffHeader =
    "family,d,eps,alpha,t,nodes,sum_tq,mean_tests,max_tests,depth,"
    "inside_ok,far_ok,band_n,build_ms,query_us";

namespace {

uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t mix_bits(uint64_t h, double v) {
    uint64_t b;
    static_assert(sizeof b == sizeof v);
    std::memcpy(&b, &v, sizeof b);
    h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

BenchConfig parse_config(std::istream& is) {
    BenchConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "families") {
            cfg.families = split_list(val);
        } else if (key == "structures") {
            cfg.structures = split_list(val);
        } else if (key == "d") {
            cfg.ds.clear();
            for (auto& v : split_list(val)) cfg.ds.push_back(std::stoi(v));
        } else if (key == "eps") {
            cfg.epses.clear();
            for (auto& v : split_list(val)) cfg.epses.push_back(std::stod(v));
        } else if (key == "alpha") {
            cfg.alphas.clear();
            for (auto& v : split_list(val)) cfg.alphas.push_back(std::stod(v));
        } else if (key == "inside") {
            cfg.counts.inside = std::stoi(val);
        } else if (key == "band") {
            cfg.counts.band = std::stoi(val);
        } else if (key == "far") {
            cfg.counts.far = std::stoi(val);
        } else if (key == "seed") {
            cfg.seed = std::stoull(val);
        } else if (key == "tangent_n") {
            cfg.tangent_n = std::stoi(val);
        } else if (key == "threads") {
            cfg.threads = std::stoi(val);
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    return cfg;
}

BenchConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    return parse_config(f);
}

namespace {

constexpr size_t kOracleBudget = 500'000'000;

struct SweepCell {
    std::string family;
    std::string structure;
    int d = 0;
    double alpha = 0.0;
    double eps = 0.0;
};

bool takes_alpha(const std::string& structure) {
    return structure == "splitreduce" || structure == "hybrid";
}

// The family instance is fixed across the eps ladder so exponent fits see one
// body; hypercylinders are generated at a coarse resolution for the same
// reason (and to keep the vertex oracle tractable), with clamping allowed.
std::string body_key(const std::string& family, int d, double alpha) {
    char buf[64];
    if (family == "hypercylinder") {
        std::snprintf(buf, sizeof buf, "%s/%d/a%g", family.c_str(), d, alpha);
    } else {
        std::snprintf(buf, sizeof buf, "%s/%d", family.c_str(), d);
    }
    return buf;
}

Polytope make_body(const std::string& family, int d, double alpha, const BenchConfig& cfg) {
    if (family == "ball") {
        double diam = 1.0 / std::sqrt(double(d));
        return gen_ball_polytope(d, diam, diam / 4.0);
    }
    if (family == "random-tangent")
        return gen_random_tangent(d, cfg.tangent_n, fnv1a(body_key(family, d, alpha)) ^ cfg.seed);
    if (family == "hypercylinder") return gen_hypercylinder(d, alpha, 0.2, true).body;
    throw std::runtime_error("unknown family " + family);
}

int theorem2_t(int d, double eps, double alpha) {
    double lg = std::log2(1.0 / eps);
    return int(std::ceil(lg / std::pow(eps, double(d - 1) / alpha)));
}

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

int64_t hybrid_cell_of(const HybridGrid& H, const Vec& q) {
    QuadtreeCell c = locate_cell(H.d, H.level, q);
    int64_t flat = 0, stride = 1;
    for (int i = 0; i < H.d; ++i) {
        flat += c.idx[i] * stride;
        stride <<= H.level;
    }
    return flat;
}

void run_queries(TradeoffRecord& rec, const std::vector<LabeledQuery>& qs,
                 const std::function<bool(const Vec&, int64_t&)>& probe) {
    Clock qc;
    double tests_sum = 0.0;
    for (const auto& lq : qs) {
        int64_t tests = 0;
        bool accepted = probe(lq.q, tests);
        tests_sum += double(tests);
        rec.max_tests = std::max(rec.max_tests, tests);
        switch (lq.label) {
            case QueryLabel::Inside:
                ++rec.inside_n;
                if (accepted) ++rec.inside_ok;
                break;
            case QueryLabel::FarExterior:
                ++rec.far_n;
                if (!accepted) ++rec.far_ok;
                break;
            case QueryLabel::BandExterior:
                ++rec.band_n;
                break;
        }
    }
    if (!qs.empty()) {
        rec.mean_tests = tests_sum / double(qs.size());
        rec.query_us = qc.ms() * 1000.0 / double(qs.size());
    }
}

TradeoffRecord run_cell(const SweepCell& cell, const BodyOracle& body,
                        const std::vector<LabeledQuery>& qs) {
    TradeoffRecord rec;
    rec.family = cell.family + "." + cell.structure;
    rec.d = cell.d;
    rec.eps = cell.eps;
    // alpha shapes either the structure or the body; zero means neither
    rec.alpha =
        (takes_alpha(cell.structure) || cell.family == "hypercylinder") ? cell.alpha : 0.0;

    if (cell.structure == "splitreduce") {
        rec.t = theorem2_t(cell.d, cell.eps, cell.alpha);
        Clock bc;
        SplitReduceTree T = build(assume_canonical(body.poly, cell.eps), rec.t);
        rec.build_ms = bc.ms();
        auto sr = space_report(T);
        rec.nodes = sr.nodes;
        rec.sum_tq = sr.sum_tq;
        rec.depth = sr.depth;
        std::ostringstream os;
        write_tree(os, T);
        rec.bytes = int64_t(os.str().size());
        run_queries(rec, qs, [&](const Vec& q, int64_t& tests) {
            SrQuery r = query(T, q);
            tests = r.tested;
            return r.inside;
        });
    } else if (cell.structure == "dudley") {
        Clock bc;
        Polytope P = dudley_approx(body, cell.eps);
        rec.build_ms = bc.ms();
        rec.nodes = 1;
        rec.sum_tq = P.size();
        rec.depth = 0;
        std::ostringstream os;
        write_polytope(os, P);
        rec.bytes = int64_t(os.str().size());
        run_queries(rec, qs, [&](const Vec& q, int64_t& tests) {
            tests = P.size();
            return exact_membership(P, q);
        });
    } else if (cell.structure == "bentley") {
        Clock bc;
        ColumnTable B = bentley_columns(body.poly, cell.eps);
        rec.build_ms = bc.ms();
        rec.nodes = int64_t(B.range.size());
        rec.sum_tq = 2 * B.nonempty_count();  // a floor and a ceiling per column
        rec.depth = 0;
        rec.bytes = int64_t(B.range.size()) * 16 + 24;
        run_queries(rec, qs, [&](const Vec& q, int64_t& tests) {
            tests = 1;
            return B.query(q);
        });
    } else if (cell.structure == "hybrid") {
        Clock bc;
        HybridGrid H = hybrid_tradeoff(body, cell.eps, cell.alpha);
        rec.build_ms = bc.ms();
        rec.nodes = int64_t(H.kind.size());
        rec.sum_tq = int64_t(H.total_halfspaces());
        rec.depth = H.level;
        rec.bytes = int64_t(H.kind.size()) +
                    int64_t(H.total_halfspaces()) * (8 * int64_t(cell.d) + 8) + 16;
        run_queries(rec, qs, [&](const Vec& q, int64_t& tests) {
            int64_t flat = hybrid_cell_of(H, q);
            tests = 1;
            if (H.kind[flat] == HybridGrid::CellKind::Boundary)
                tests += int64_t(H.planes[flat].size());
            return H.query(q);
        });
    } else {
        throw std::runtime_error("unknown structure " + cell.structure);
    }
    return rec;
}

}  // namespace

std::vector<TradeoffRecord> sweep(const BenchConfig& cfg) {
    // deterministic cell order: family, d, structure, alpha (when taken), eps
    std::vector<SweepCell> cells;
    for (const auto& f : cfg.families)
        for (int d : cfg.ds)
            for (const auto& s : cfg.structures) {
                // bodies of the hypercylinder family depend on alpha as well
                std::vector<double> alphas =
                    (takes_alpha(s) || f == "hypercylinder") ? cfg.alphas : std::vector<double>{0.0};
                for (double a : alphas)
                    for (double eps : cfg.epses) cells.push_back({f, s, d, a, eps});
            }

    // bodies and labeled queries are shared between cells; build them first
    std::map<std::string, BodyOracle> bodies;
    for (const auto& c : cells) {
        double ba = c.family == "hypercylinder" ? c.alpha : 0.0;
        std::string key = body_key(c.family, c.d, ba);
        if (!bodies.count(key))
            bodies.emplace(key, BodyOracle(make_body(c.family, c.d, ba, cfg), kOracleBudget));
    }
    std::map<std::string, std::vector<LabeledQuery>> queries;
    for (const auto& c : cells) {
        double ba = c.family == "hypercylinder" ? c.alpha : 0.0;
        std::string bkey = body_key(c.family, c.d, ba);
        char qk[96];
        std::snprintf(qk, sizeof qk, "%s|%g", bkey.c_str(), c.eps);
        if (!queries.count(qk)) {
            uint64_t qseed = mix_bits(fnv1a(bkey) ^ cfg.seed, c.eps);
            queries.emplace(qk, gen_queries(bodies.at(bkey), c.eps, cfg.counts, qseed));
        }
    }

    std::vector<TradeoffRecord> recs(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const auto& c = cells[i];
            double ba = c.family == "hypercylinder" ? c.alpha : 0.0;
            std::string bkey = body_key(c.family, c.d, ba);
            char qk[96];
            std::snprintf(qk, sizeof qk, "%s|%g", bkey.c_str(), c.eps);
            try {
                recs[i] = run_cell(c, bodies.at(bkey), queries.at(qk));
            } catch (const std::exception& e) {
                // a failed cell is recorded, not fatal; the gate stays red
                recs[i].family = c.family + "." + c.structure;
                recs[i].d = c.d;
                recs[i].eps = c.eps;
                recs[i].alpha = c.alpha;
                errors[i] = e.what();
            }
        }
    };
    int nthreads = cfg.threads > 0 ? cfg.threads : int(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, int(cells.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return recs;
}

ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 points");
    int n = int(x.size());
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_exponent: positive data only");
        lx[i] = std::log2(x[i]);
        ly[i] = std::log2(y[i]);
    }
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_exponent: degenerate ladder");
    ExponentFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = syy - sxy * sxy / sxx;
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::string records_csv(const std::vector<TradeoffRecord>& recs) {
    std::string out = kTradeoffHeader;
    out += '\n';
    char buf[512];
    for (const auto& r : recs) {
        std::snprintf(buf, sizeof buf,
                      "%s,%d,%g,%g,%d,%lld,%lld,%.17g,%lld,%d,%lld,%lld,%lld,%.3f,%.3f\n",
                      r.family.c_str(), r.d, r.eps, r.alpha, r.t, (long long)r.nodes,
                      (long long)r.sum_tq, r.mean_tests, (long long)r.max_tests, r.depth,
                      (long long)r.inside_ok, (long long)r.far_ok, (long long)r.band_n,
                      r.build_ms, r.query_us);
        out += buf;
    }
    return out;
}

std::vector<TradeoffRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("records csv: missing header");
    std::vector<TradeoffRecord> recs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> f;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 15) throw std::runtime_error("records csv: bad row");
        TradeoffRecord r;
        r.family = f[0];
        r.d = std::stoi(f[1]);
        r.eps = std::stod(f[2]);
        r.alpha = std::stod(f[3]);
        r.t = std::stoi(f[4]);
        r.nodes = std::stoll(f[5]);
        r.sum_tq = std::stoll(f[6]);
        r.mean_tests = std::stod(f[7]);
        r.max_tests = std::stoll(f[8]);
        r.depth = std::stoi(f[9]);
        r.inside_ok = std::stoll(f[10]);
        r.far_ok = std::stoll(f[11]);
        r.band_n = std::stoll(f[12]);
        r.build_ms = std::stod(f[13]);
        r.query_us = std::stod(f[14]);
        recs.push_back(std::move(r));
    }
    return recs;
}

std::string strip_timing(const std::string& csv) {
    std::string out;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
        // drop the last two comma-separated fields, the timing columns
        size_t c2 = line.rfind(',');
        if (c2 != std::string::npos) {
            size_t c1 = line.rfind(',', c2 - 1);
            if (c1 != std::string::npos) line = line.substr(0, c1);
        }
        out += line;
        out += '\n';
    }
    return out;
}

bool gates_pass(const std::vector<TradeoffRecord>& recs) {
    for (const auto& r : recs)
        if (!r.gate()) return false;
    return true;
}

namespace {

double theorem1_storage(int d, double alpha) { return double(d - 1) * (1.0 - 1.0 / alpha); }
double theorem1_query(int d, double alpha) { return double(d - 1) / alpha; }
double theorem2_storage(int d, double alpha) {
    double lg = std::floor(std::log2(alpha));
    return double(d - 1) * (1.0 - (2.0 * lg - 2.0) / alpha);
}
double theorem3_floor(int d, double alpha) {
    return double(d - 1) * (1.0 - (2.0 * std::sqrt(2.0 * alpha) - 3.0) / alpha) - 1.0;
}

}  // namespace

std::string summary(const std::vector<TradeoffRecord>& recs) {
    // group by (family, d, alpha) and fit over the eps ladder
    std::map<std::string, std::vector<const TradeoffRecord*>> groups;
    for (const auto& r : recs) {
        char key[128];
        std::snprintf(key, sizeof key, "%s|d=%d|alpha=%g", r.family.c_str(), r.d, r.alpha);
        groups[key].push_back(&r);
    }
    std::ostringstream out;
    out << "group: storage and query-cost exponents over the eps ladder\n";
    char buf[256];
    for (auto& [key, g] : groups) {
        if (g.size() < 3) continue;
        std::vector<double> x, ys, yq;
        for (auto* r : g) {
            x.push_back(1.0 / r->eps);
            ys.push_back(double(std::max<int64_t>(r->sum_tq, 1)));
            yq.push_back(std::max(r->mean_tests, 1.0));
        }
        ExponentFit fs, fq;
        try {
            fs = fit_exponent(x, ys);
            fq = fit_exponent(x, yq);
        } catch (const std::exception&) {
            continue;  // ladder too degenerate to fit
        }
        const TradeoffRecord& r0 = *g.front();
        std::snprintf(buf, sizeof buf, "%s: storage %.3f (r2 %.3f), query %.3f (r2 %.3f)\n",
                      key.c_str(), fs.slope, fs.r2, fq.slope, fq.r2);
        out << buf;
        bool is_sr = r0.family.find(".splitreduce") != std::string::npos;
        bool is_hy = r0.family.find(".hybrid") != std::string::npos;
        if (is_hy && r0.alpha > 0) {
            std::snprintf(buf, sizeof buf,
                          "  simple trade-off targets: storage %.3f, query %.3f\n",
                          theorem1_storage(r0.d, r0.alpha), theorem1_query(r0.d, r0.alpha));
            out << buf;
        }
        if (is_sr && r0.alpha > 0) {
            double want = theorem2_storage(r0.d, r0.alpha);
            std::snprintf(buf, sizeof buf,
                          "  split-reduce targets: storage %.3f, lower-bound floor %.3f\n", want,
                          theorem3_floor(r0.d, r0.alpha));
            out << buf;
            if (fs.slope > want + 0.5) {
                std::snprintf(buf, sizeof buf,
                              "  WARNING: fitted storage slope %.3f exceeds the target %.3f by more "
                              "than 0.5\n",
                              fs.slope, want);
                out << buf;
            }
        }
    }
    int64_t bad = 0;
    for (const auto& r : recs)
        if (!r.gate()) ++bad;
    if (bad == 0) {
        out << "correctness gates: all records clean\n";
    } else {
        snprintf(buf, sizeof buf, "correctness gates: %lld record(s) VIOLATED\n", (long long)bad);
        out << buf;
    }
    return out.str();
}

}  // namespace polymem
