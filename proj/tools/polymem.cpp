#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "polymem/ann.hpp"
#include "polymem/bench.hpp"
#include "polymem/splitreduce.hpp"
#include "polymem/workloads.hpp"

using namespace polymem;

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw std::runtime_error("cannot read " + path);
    return f;
}

Polytope load_body(const std::string& path) {
    auto f = open_in(path);
    return read_polytope(f);
}

int cmd_gen(const std::string& family, int d, int n, double diam, double facet_eps, double alpha,
            double eps, bool clamp, uint64_t seed, const std::string& out) {
    Polytope K;
    if (family == "random-tangent") {
        K = gen_random_tangent(d, n, seed);
    } else if (family == "ball") {
        K = gen_ball_polytope(d, diam, facet_eps > 0 ? facet_eps : diam / 4.0);
    } else if (family == "hypercylinder") {
        Hypercylinder H = gen_hypercylinder(d, alpha, eps, clamp);
        std::fprintf(stderr, "hypercylinder: k=%d t=%d delta=%.6g%s\n", H.k, H.t, H.delta,
                     H.clamped ? " (clamped)" : "");
        K = std::move(H.body);
    } else {
        std::fprintf(stderr, "unknown family %s (random-tangent, ball, hypercylinder)\n",
                     family.c_str());
        return 2;
    }
    auto f = open_out(out);
    write_polytope(f, K);
    std::fprintf(stderr, "gen: %d halfspaces in dimension %d -> %s\n", int(K.size()), K.dim,
                 out.c_str());
    return 0;
}

int cmd_gen_points(int d, int n, const std::string& dist, uint64_t seed, const std::string& out) {
    PointDist pd;
    if (dist == "uniform") {
        pd = PointDist::Uniform;
    } else if (dist == "clusters") {
        pd = PointDist::Clusters;
    } else if (dist == "sphere") {
        pd = PointDist::Sphere;
    } else {
        std::fprintf(stderr, "unknown distribution %s (uniform, clusters, sphere)\n", dist.c_str());
        return 2;
    }
    auto f = open_out(out);
    write_points_csv(f, gen_points(d, n, pd, seed));
    return 0;
}

int cmd_gen_queries(const std::string& body, double eps, int inside, int band, int far,
                    uint64_t seed, size_t budget, const std::string& out) {
    BodyOracle oracle(load_body(body), budget);
    auto qs = gen_queries(oracle, eps, {inside, band, far}, seed);
    auto f = open_out(out);
    write_queries_csv(f, qs);
    std::fprintf(stderr, "gen-queries: %d labeled queries -> %s\n", int(qs.size()), out.c_str());
    return 0;
}

int cmd_build(const std::string& body, double eps, int t, bool strict, bool assume, size_t budget,
              const std::string& out) {
    Polytope K = load_body(body);
    CanonicalForm C = assume ? assume_canonical(K, eps) : canonicalize(K, eps, budget);
    SplitReduceTree T = build(C, t, strict);
    auto rep = space_report(T);
    save_tree(out, T);
    std::fprintf(stderr,
                 "build: depth=%d nodes=%lld bundles=%lld halfspaces=%lld eps_abs=%.6g -> %s\n",
                 rep.depth, (long long)rep.nodes, (long long)rep.bundle_leaves,
                 (long long)rep.sum_tq, T.form.eps_abs, out.c_str());
    return 0;
}

int cmd_query(const std::string& tree, const std::string& points, const std::string& out) {
    SplitReduceTree T = load_tree(tree);
    auto pf = open_in(points);
    std::vector<Vec> pts = read_points_csv(pf);
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out.empty()) {
        f = open_out(out);
        os = &f;
    }
    *os << "point_id,inside,levels,tested\n";
    for (size_t i = 0; i < pts.size(); ++i) {
        SrQuery r = query(T, T.form.map.apply(pts[i]));
        *os << i << ',' << (r.inside ? 1 : 0) << ',' << r.levels << ',' << r.tested << '\n';
    }
    return 0;
}

int cmd_ann_build(const std::string& points, double eps, int t, const std::string& out) {
    auto pf = open_in(points);
    std::vector<Vec> X = read_points_csv(pf);
    AnnIndex I = build_ann(X, eps, t);
    save_ann(out, I);
    std::fprintf(stderr, "ann-build: %d sites, %d cells, %d envelope trees, depth %d -> %s\n",
                 int(I.pts.size()), int(I.cells.size()), int(I.far.size()), I.depth, out.c_str());
    return 0;
}

int cmd_ann_query(const std::string& index, const std::string& queries, const std::string& out) {
    AnnIndex I = load_ann(index);
    auto qf = open_in(queries);
    std::vector<Vec> qs = read_points_csv(qf);
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out.empty()) {
        f = open_out(out);
        os = &f;
    }
    char buf[128];
    *os << "query_id,site_id,distance,cost\n";
    for (size_t i = 0; i < qs.size(); ++i) {
        AnnAnswer a = ann_query(I, qs[i]);
        // cost counts descent levels, direct distance evaluations, and
        // ray-shoot bisection steps
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%d\n", i, a.site, a.dist,
                      a.levels + a.scanned + a.ray_iters);
        *os << buf;
    }
    return 0;
}

int cmd_bench(const std::string& config, const std::string& out) {
    BenchConfig cfg = config.empty() ? BenchConfig{} : parse_config_file(config);
    auto recs = sweep(cfg);
    if (!out.empty()) {
        auto f = open_out(out);
        f << records_csv(recs);
    } else {
        std::cout << records_csv(recs);
    }
    std::cerr << summary(recs);
    if (!gates_pass(recs)) {
        std::fprintf(stderr, "bench: correctness gate FAILED\n");
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate polytope membership: generators, trees, ANN, benchmarks"};
    app.require_subcommand(1);

    std::string family = "random-tangent", dist = "uniform";
    std::string body, points, queries, tree, index, config, out;
    int d = 2, n = 32, t = 4, inside = 100, band = 100, far = 100;
    double diam = 0.5, facet_eps = 0.0, alpha = 4.0, eps = 0.1;
    bool clamp = false, strict = false, assume = false;
    uint64_t seed = 1;
    size_t budget = 2'000'000;

    auto* gen = app.add_subcommand("gen", "generate a polytope body");
    gen->add_option("--family", family, "random-tangent, ball, or hypercylinder");
    gen->add_option("--d", d, "ambient dimension")->required();
    gen->add_option("--n", n, "halfspace count (random-tangent)");
    gen->add_option("--diam", diam, "body diameter (ball)");
    gen->add_option("--facet-eps", facet_eps, "facet resolution (ball; default diam/4)");
    gen->add_option("--alpha", alpha, "trade-off parameter (hypercylinder)");
    gen->add_option("--eps", eps, "approximation scale (hypercylinder)");
    gen->add_flag("--clamp", clamp, "clamp the hard-family diameter to fit the domain");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("-o,--out", out, "output body file")->required();

    auto* gp = app.add_subcommand("gen-points", "generate a point cloud csv");
    gp->add_option("--d", d, "ambient dimension")->required();
    gp->add_option("--n", n, "point count")->required();
    gp->add_option("--dist", dist, "uniform, clusters, or sphere");
    gp->add_option("--seed", seed, "rng seed");
    gp->add_option("-o,--out", out, "output csv")->required();

    auto* gq = app.add_subcommand("gen-queries", "generate oracle-labeled queries for a body");
    gq->add_option("--body", body, "body file from gen")->required();
    gq->add_option("--eps", eps, "band scale")->required();
    gq->add_option("--inside", inside, "inside query count");
    gq->add_option("--band", band, "band-exterior query count");
    gq->add_option("--far", far, "far-exterior query count");
    gq->add_option("--seed", seed, "rng seed");
    gq->add_option("--budget", budget, "vertex enumeration budget");
    gq->add_option("-o,--out", out, "output csv")->required();

    auto* bd = app.add_subcommand("build", "build a membership tree for a body");
    bd->add_option("--body", body, "body file")->required();
    bd->add_option("--eps", eps, "approximation parameter")->required();
    bd->add_option("--t", t, "bundle budget per leaf")->required();
    bd->add_flag("--strict", strict, "accept only cells the body contains");
    bd->add_flag("--assume-canonical", assume,
                 "skip preconditioning; the body is already fat in the reference box and eps "
                 "is absolute");
    bd->add_option("--budget", budget, "vertex enumeration budget (preconditioning)");
    bd->add_option("-o,--out", out, "output tree file")->required();

    auto* qu = app.add_subcommand("query", "run membership queries against a tree");
    qu->add_option("--tree", tree, "tree file from build")->required();
    qu->add_option("--points", points, "points csv")->required();
    qu->add_option("-o,--out", out, "output csv (default stdout)");

    auto* ab = app.add_subcommand("ann-build", "build a nearest-neighbor index over sites");
    ab->add_option("--points", points, "sites csv")->required();
    ab->add_option("--eps", eps, "relative error bound")->required();
    ab->add_option("--t", t, "bundle budget for envelope trees");
    ab->add_option("-o,--out", out, "output index file")->required();

    auto* aq = app.add_subcommand("ann-query", "query a nearest-neighbor index");
    aq->add_option("--index", index, "index file from ann-build")->required();
    aq->add_option("--queries", queries, "query points csv")->required();
    aq->add_option("-o,--out", out, "output csv (default stdout)");

    auto* be = app.add_subcommand("bench", "sweep structures over bodies and emit the tradeoff csv");
    be->add_option("--config", config, "flat key = value config (default built-in sweep)");
    be->add_option("-o,--out", out, "output csv (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(family, d, n, diam, facet_eps, alpha, eps, clamp, seed, out);
        if (gp->parsed()) return cmd_gen_points(d, n, dist, seed, out);
        if (gq->parsed()) return cmd_gen_queries(body, eps, inside, band, far, seed, budget, out);
        if (bd->parsed()) return cmd_build(body, eps, t, strict, assume, budget, out);
        if (qu->parsed()) return cmd_query(tree, points, out);
        if (ab->parsed()) return cmd_ann_build(points, eps, t, out);
        if (aq->parsed()) return cmd_ann_query(index, queries, out);
        if (be->parsed()) return cmd_bench(config, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
