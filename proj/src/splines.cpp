#include "beam/splines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace beam {

KnotVector::KnotVector(std::vector<double> k, int p) : knots(std::move(k)), degree(p) {}

void KnotVector::validate() const {
    if (degree < 0) throw DomainError("knot vector: negative degree");
    if (n_cp() < degree + 1) throw DomainError("knot vector: too few knots for degree");
    for (size_t i = 1; i < knots.size(); ++i)
        if (knots[i] < knots[i - 1]) throw DomainError("knot vector: knots decreasing");
    for (int i = 0; i <= degree; ++i) {
        if (knots[i] != knots[0] || knots[knots.size() - 1 - i] != knots.back())
            throw DomainError("knot vector: not open (clamped)");
    }
    if (!(knots.back() > knots.front())) throw DomainError("knot vector: empty domain");
}

KnotVector KnotVector::open_uniform(int p, int n_el) {
    std::vector<double> k(p + 1, 0.0);
    for (int i = 1; i < n_el; ++i) k.push_back(double(i) / n_el);
    k.insert(k.end(), p + 1, 1.0);
    return {k, p};
}

int KnotVector::find_span(double xi) const {
    const int n = n_cp();
    if (xi < front() || xi > back()) throw DomainError("parameter " + std::to_string(xi) + " outside knot domain");
    if (xi >= knots[n]) return n - 1;
    // upper_bound gives first knot > xi
    auto it = std::upper_bound(knots.begin() + degree, knots.begin() + n + 1, xi);
    return static_cast<int>(it - knots.begin()) - 1;
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> b;
    for (double k : knots)
        if (b.empty() || k > b.back()) b.push_back(k);
    return b;
}

BasisTable eval_basis(const KnotVector& kv, double xi, int n_derivs) {
    const int p = kv.degree;
    const int span = kv.find_span(xi);
    const auto& U = kv.knots;
    BasisTable out;
    out.first = span - p;
    out.ders = Eigen::MatrixXd::Zero(n_derivs + 1, p + 1);

    // Piegl & Tiller, algorithm A2.3
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - U[span + 1 - j];
        right[j] = U[span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j) out.ders(0, j) = ndu(j, p);

    const int nd = std::min(n_derivs, p);
    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            out.ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double fac = p;
    for (int k = 1; k <= nd; ++k) {
        out.ders.row(k) *= fac;
        fac *= (p - k);
    }
    return out;
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
    if (kv.degree == 0) throw DomainError("greville abscissae undefined for degree 0");
    std::vector<double> g(kv.n_cp());
    for (int J = 0; J < kv.n_cp(); ++J) {
        double s = 0.0;
        for (int i = 1; i <= kv.degree; ++i) s += kv.knots[J + i];
        g[J] = s / kv.degree;
    }
    return g;
}

KnotVector derive_field_knots(const KnotVector& geom_kv, int target_degree, int continuity_drop) {
    const auto& U = geom_kv.knots;
    const auto bp = geom_kv.breakpoints();
    std::vector<double> k(target_degree + 1, bp.front());
    for (size_t i = 1; i + 1 < bp.size(); ++i) {
        const auto m = std::count(U.begin(), U.end(), bp[i]);
        const int c = std::min(target_degree - 1, geom_kv.degree - static_cast<int>(m) - continuity_drop);
        k.insert(k.end(), std::clamp(target_degree - c, 1, target_degree + 1), bp[i]);
    }
    k.insert(k.end(), target_degree + 1, bp.back());
    return {k, target_degree};
}

BasisTable SplineSpace::eval(double xi, int n_derivs) const {
    BasisTable b = eval_basis(kv, xi, n_derivs);
    if (!rational()) return b;
    const int p = kv.degree;
    Eigen::MatrixXd A = b.ders;
    Eigen::VectorXd W = Eigen::VectorXd::Zero(n_derivs + 1);
    for (int j = 0; j <= p; ++j) {
        A.col(j) *= weights[b.first + j];
        W += A.col(j);
    }
    // R^(k) = (A^(k) - sum_{j=1..k} C(k,j) W^(j) R^(k-j)) / W
    Eigen::MatrixXd R(n_derivs + 1, p + 1);
    for (int k = 0; k <= n_derivs; ++k) {
        Eigen::RowVectorXd v = A.row(k);
        double binom = 1.0;
        for (int j = 1; j <= k; ++j) {
            binom = binom * (k - j + 1) / j;
            v -= binom * W[j] * R.row(k - j);
        }
        R.row(k) = v / W[0];
    }
    b.ders = R;
    return b;
}

void NurbsCurve::validate() const {
    basis.validate();
    if (static_cast<int>(control_points.size()) != basis.n_cp() ||
        static_cast<int>(weights.size()) != basis.n_cp())
        throw DomainError("nurbs curve: control net size mismatch");
    for (double w : weights)
        if (!(w > 0.0)) throw DomainError("nurbs curve: non-positive weight");
}

std::vector<Vec3> curve_point(const NurbsCurve& c, double xi, int n_derivs) {
    const BasisTable b = c.space().eval(xi, n_derivs);
    std::vector<Vec3> out(n_derivs + 1, Vec3::Zero());
    for (int k = 0; k <= n_derivs; ++k)
        for (int j = 0; j < b.ders.cols(); ++j) out[k] += b.ders(k, j) * c.control_points[b.first + j];
    return out;
}

ParamMap::ParamMap(NurbsCurve curve) : curve_(std::move(curve)) {
    curve_.validate();
    std::vector<double> gx, gw;
    const int ng = curve_.basis.degree + 4;
    gauss_legendre(ng, gx, gw);
    const auto bp = curve_.basis.breakpoints();
    // rational spans need subdivision to reach round-off
    const int sub = curve_.weights.empty() ? 1 : 8;
    for (size_t e = 0; e + 1 < bp.size(); ++e)
        for (int k = 0; k < sub; ++k) {
            const double a = bp[e] + (bp[e + 1] - bp[e]) * k / sub, h = 0.5 * (bp[e + 1] - bp[e]) / sub;
            for (int q = 0; q < ng; ++q) length_ += gw[q] * h * jacobian(a + h * (gx[q] + 1.0));
        }
}

double ParamMap::jacobian(double xi) const {
    const double j = curve_point(curve_, xi, 1)[1].norm();
    if (!(j > 0.0)) throw GeometryError("degenerate curve: zero tangent");
    return j;
}

double arc_length_jacobian(const ParamMap& pm, double xi) { return pm.jacobian(xi); }

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

namespace {

using Vec4 = Eigen::Vector4d;

std::vector<Vec4> homogeneous(const NurbsCurve& c) {
    std::vector<Vec4> pw(c.control_points.size());
    for (size_t i = 0; i < pw.size(); ++i) {
        pw[i].head<3>() = c.weights[i] * c.control_points[i];
        pw[i][3] = c.weights[i];
    }
    return pw;
}

NurbsCurve from_homogeneous(const KnotVector& kv, const std::vector<Vec4>& pw) {
    NurbsCurve c;
    c.basis = kv;
    for (const auto& q : pw) {
        c.control_points.push_back(q.head<3>() / q[3]);
        c.weights.push_back(q[3]);
    }
    return c;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<Vec4> elevate_bezier(const std::vector<Vec4>& P, int t) {
    const int p = static_cast<int>(P.size()) - 1;
    std::vector<Vec4> Q(p + t + 1, Vec4::Zero());
    for (int i = 0; i <= p + t; ++i)
        for (int j = std::max(0, i - t); j <= std::min(p, i); ++j)
            Q[i] += binomial(p, j) * binomial(t, i - j) / binomial(p + t, i) * P[j];
    return Q;
}

NurbsCurve join_beziers(const std::vector<std::vector<Vec4>>& pieces, int p) {
    const int np = static_cast<int>(pieces.size());
    std::vector<double> k(p + 1, 0.0);
    for (int i = 1; i < np; ++i) k.insert(k.end(), p, double(i) / np);
    k.insert(k.end(), p + 1, 1.0);
    std::vector<Vec4> pw;
    for (int i = 0; i < np; ++i)
        for (size_t j = (i == 0 ? 0 : 1); j < pieces[i].size(); ++j) pw.push_back(pieces[i][j]);
    return from_homogeneous({k, p}, pw);
}

}  // namespace

NurbsCurve insert_knot(const NurbsCurve& c, double xi) {
    const auto& U = c.basis.knots;
    const int p = c.basis.degree;
    const int k = c.basis.find_span(xi);
    const auto Pw = homogeneous(c);
    std::vector<Vec4> Q(Pw.size() + 1);
    for (int i = 0; i <= k - p; ++i) Q[i] = Pw[i];
    for (size_t i = k; i < Pw.size(); ++i) Q[i + 1] = Pw[i];
    for (int i = k - p + 1; i <= k; ++i) {
        const double a = (xi - U[i]) / (U[i + p] - U[i]);
        Q[i] = a * Pw[i] + (1.0 - a) * Pw[i - 1];
    }
    std::vector<double> nk(U.begin(), U.begin() + k + 1);
    nk.push_back(xi);
    nk.insert(nk.end(), U.begin() + k + 1, U.end());
    return from_homogeneous({nk, p}, Q);
}

NurbsCurve refine_uniform(const NurbsCurve& c, int n_sub) {
    NurbsCurve out = c;
    const auto bp = c.basis.breakpoints();
    for (size_t e = 0; e + 1 < bp.size(); ++e)
        for (int i = 1; i < n_sub; ++i) out = insert_knot(out, bp[e] + (bp[e + 1] - bp[e]) * i / n_sub);
    return out;
}

NurbsCurve make_line(const Vec3& a, const Vec3& b, int degree, int n_el) {
    if (degree < 1 || n_el < 1) throw DomainError("line: degree and element count must be positive");
    std::vector<Vec4> P(2);
    P[0] << a, 1.0;
    P[1] << b, 1.0;
    return refine_uniform(join_beziers({elevate_bezier(P, degree - 1)}, degree), n_el);
}

NurbsCurve make_arc(const Vec3& center, const Vec3& u, const Vec3& v, double radius, double a0, double sweep,
                    int degree, int n_el, int min_pieces) {
    if (degree < 2) throw DomainError("arc: exact circle needs degree >= 2");
    if (!(radius > 0.0)) throw DomainError("arc: radius must be positive");
    int np = std::max(min_pieces, static_cast<int>(std::ceil(std::abs(sweep) / (0.5 * std::numbers::pi) - 1e-12)));
    if (n_el % np != 0) throw DomainError("arc: element count must be a multiple of " + std::to_string(np));
    const double da = sweep / np;
    const double wm = std::cos(0.5 * da);
    auto at = [&](double ang, double r) -> Vec3 { return center + r * (std::cos(ang) * u + std::sin(ang) * v); };
    std::vector<std::vector<Vec4>> pieces;
    for (int i = 0; i < np; ++i) {
        const double s = a0 + i * da;
        std::vector<Vec4> P(3);
        P[0] << at(s, radius), 1.0;
        P[1] << wm * at(s + 0.5 * da, radius / wm), wm;
        P[2] << at(s + da, radius), 1.0;
        pieces.push_back(elevate_bezier(P, degree - 2));
    }
    return refine_uniform(join_beziers(pieces, degree), n_el / np);
}

}  // namespace beam
