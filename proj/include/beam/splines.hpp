#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace beam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KnotVector {
    std::vector<double> knots;
    int degree = 0;

    KnotVector() = default;
    KnotVector(std::vector<double> k, int p);

    int n_cp() const { return static_cast<int>(knots.size()) - degree - 1; }
    double front() const { return knots.front(); }
    double back() const { return knots.back(); }

    // Span index i with knots[i] <= xi < knots[i+1]; last span is closed.
    int find_span(double xi) const;
    std::vector<double> breakpoints() const;
    void validate() const;

    static KnotVector open_uniform(int p, int n_el);
};

// Row k holds the k-th derivatives of the degree+1 nonzero functions
// starting at index `first`.
struct BasisTable {
    int first = 0;
    Eigen::MatrixXd ders;
};

BasisTable eval_basis(const KnotVector& kv, double xi, int n_derivs);
std::vector<double> greville_abscissae(const KnotVector& kv);
// Same breakpoints; continuity at each is that of the geometry minus
// continuity_drop, capped at target_degree - 1.
KnotVector derive_field_knots(const KnotVector& geom_kv, int target_degree, int continuity_drop = 0);

// B-spline or NURBS function space (weights empty means polynomial).
struct SplineSpace {
    KnotVector kv;
    std::vector<double> weights;

    int size() const { return kv.n_cp(); }
    int degree() const { return kv.degree; }
    bool rational() const { return !weights.empty(); }
    BasisTable eval(double xi, int n_derivs) const;
};

struct NurbsCurve {
    KnotVector basis;
    std::vector<Vec3> control_points;
    std::vector<double> weights;

    void validate() const;
    SplineSpace space() const { return {basis, weights}; }
};

// Position followed by parametric derivatives up to n_derivs.
std::vector<Vec3> curve_point(const NurbsCurve& c, double xi, int n_derivs);

class ParamMap {
public:
    explicit ParamMap(NurbsCurve curve);
    const NurbsCurve& curve() const { return curve_; }
    double length() const { return length_; }
    double jacobian(double xi) const;

private:
    NurbsCurve curve_;
    double length_ = 0.0;
};

double arc_length_jacobian(const ParamMap& pm, double xi);

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Curve construction and refinement.
NurbsCurve insert_knot(const NurbsCurve& c, double xi);
NurbsCurve refine_uniform(const NurbsCurve& c, int n_sub);
NurbsCurve make_line(const Vec3& a, const Vec3& b, int degree, int n_el);
// Circular arc about `center` in the plane (u, v), from angle a0 over sweep.
// Split into pieces of at most 90 degrees joined with C0 continuity.
NurbsCurve make_arc(const Vec3& center, const Vec3& u, const Vec3& v, double radius,
                    double a0, double sweep, int degree, int n_el, int min_pieces = 1);

}  // namespace beam
