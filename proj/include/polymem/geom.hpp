#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace polymem {

using Vec = std::vector<double>;

/* All comparison tolerances live here so every module agrees on them. */
struct Tolerances {
    double membership = 1e-12;  // exact_membership slack
    double lp = 1e-10;          // LP feasibility slack
    double dedup = 1e-9;        // halfspace / vertex deduplication
    double mvee_rel = 1e-6;     // enclosing-ellipsoid relative volume tolerance
};
inline constexpr Tolerances kTol{};

// Reference domain: axis-aligned hypercube of unit diameter centered at the
// origin. Side 1/sqrt(d), inscribed ball radius 1/(2 sqrt(d)).
inline double unit_box_side(int d) { return 1.0 / std::sqrt(double(d)); }
inline double inscribed_radius(int d) { return 0.5 / std::sqrt(double(d)); }

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);

/* Closed halfspace {x : <normal, x> <= offset}, normal stored unit length. */
struct Halfspace {
    Vec normal;
    double offset = 0.0;

    Halfspace() = default;
    Halfspace(Vec n, double b);  // normalizes; throws on zero normal

    double eval(const Vec& x) const { return dot(normal, x) - offset; }
    bool contains(const Vec& x, double tol = kTol.membership) const {
        return eval(x) <= tol;
    }
};

/* Intersection of closed halfspaces in R^d. */
struct Polytope {
    int dim = 0;
    std::vector<Halfspace> halfspaces;

    Polytope() = default;
    Polytope(int d, std::vector<Halfspace> hs) : dim(d), halfspaces(std::move(hs)) {}

    int size() const { return int(halfspaces.size()); }
    bool contains(const Vec& x, double tol = kTol.membership) const;
};

bool exact_membership(const Polytope& K, const Vec& q, double tol = kTol.membership);

// Text format: "d n" header then n rows of d+1 reals (normal then offset).
void write_polytope(std::ostream& os, const Polytope& K);
Polytope read_polytope(std::istream& is);
void save_polytope(const std::string& path, const Polytope& K);
Polytope load_polytope(const std::string& path);

// Point-set text format: "d m" header then m rows of d reals. The reader
// accepts commas or whitespace as separators.
void write_points(std::ostream& os, const std::vector<Vec>& pts);
std::vector<Vec> read_points(std::istream& is);
void save_points(const std::string& path, const std::vector<Vec>& pts);
std::vector<Vec> load_points(const std::string& path);

/* Axis-aligned box. */
struct Box {
    Vec lo, hi;

    int dim() const { return int(lo.size()); }
    double side(int i) const { return hi[i] - lo[i]; }
    double diameter() const;
    Vec center() const;
    Vec corner(uint64_t mask) const;  // bit i set -> hi on axis i
    uint64_t corner_count() const { return uint64_t(1) << dim(); }
    bool contains(const Vec& q, double tol = 0.0) const;
    double dist_to(const Vec& q) const;  // Euclidean distance from q to box
};

// 2d halfspaces bounding the box.
std::vector<Halfspace> box_halfspaces(const Box& b);
Box unit_box(int d);  // the reference domain above

/* Dyadic cell of the quadtree over the reference domain: level plus integer
 * coordinates in [0, 2^level)^d. Geometry derives from the integers so shared
 * corners are bit-identical across levels. */
struct QuadtreeCell {
    int level = 0;
    std::vector<int64_t> idx;

    static QuadtreeCell root(int d) { return {0, std::vector<int64_t>(d, 0)}; }
    int dim() const { return int(idx.size()); }
    double diameter() const { return std::ldexp(1.0, -level); }
    Box box() const;
    QuadtreeCell child(uint64_t mask) const;  // bit i set -> upper half on axis i
    uint64_t child_count() const { return uint64_t(1) << dim(); }
};

// Cell of the given level containing q (upper-closed tie rule: points on a
// shared face belong to the larger-index cell; the domain's outer faces stay
// closed). q must lie in the reference domain.
QuadtreeCell locate_cell(int d, int level, const Vec& q);

struct Ball {
    Vec center;
    double radius = 0.0;
};

/* Deterministic RNG helpers; distributions are hand-rolled so results do not
 * depend on the standard library's implementation. */
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next();
    double uniform();                       // [0, 1)
    double uniform(double a, double b);
    double normal();
    Vec unit_vector(int d);
    Vec point_in_box(const Box& b);
    size_t index(size_t n);                 // uniform in [0, n)

  private:
    uint64_t state_;
};

}  // namespace polymem
