#include "beam/kinematics.hpp"

#include "beam/banded.hpp"

#include <algorithm>
#include <cmath>

namespace beam {

namespace {

// parts of q: a = phi_s, d1, d2, e1 = d1_s, e2 = d2_s
constexpr int kPair[15][2] = {{0, 0}, {0, 3}, {0, 4}, {3, 3}, {4, 4}, {3, 4}, {0, 1}, {0, 2},
                              {1, 3}, {1, 4}, {2, 3}, {2, 4}, {1, 1}, {2, 2}, {1, 2}};

struct CurveFrame {
    Vec3 x, t, ts;
    double kappa = 0.0, tau = 0.0;
};

CurveFrame curve_frame(const NurbsCurve& c, double xi, bool torsion) {
    const auto d = curve_point(c, xi, torsion ? 3 : 2);
    CurveFrame f;
    f.x = d[0];
    const double j = d[1].norm();
    if (!(j > 0.0)) throw GeometryError("degenerate curve: zero tangent");
    f.t = d[1] / j;
    f.ts = (d[2] - f.t.dot(d[2]) * f.t) / (j * j);
    f.kappa = f.ts.norm();
    if (torsion) {
        const Vec3 c12 = d[1].cross(d[2]);
        const double n2 = c12.squaredNorm();
        f.tau = n2 > 0.0 ? c12.dot(d[3]) / n2 : 0.0;
    }
    return f;
}

// Double-reflection step of the rotation-minimizing frame.
Vec3 reflect_step(const Vec3& x0, const Vec3& t0, const Vec3& r0, const Vec3& x1, const Vec3& t1) {
    const Vec3 v1 = x1 - x0;
    const double c1 = v1.squaredNorm();
    if (c1 == 0.0) return r0;
    const Vec3 rL = r0 - (2.0 / c1) * v1.dot(r0) * v1;
    const Vec3 tL = t0 - (2.0 / c1) * v1.dot(t0) * v1;
    if (t0.dot(t1) < 0.0) throw GeometryError("smallest-rotation frame: tangent flip between samples");
    const Vec3 v2 = t1 - tL;
    const double c2 = v2.squaredNorm();
    Vec3 r1 = c2 > 0.0 ? Vec3(rL - (2.0 / c2) * v2.dot(rL) * v2) : rL;
    r1 -= r1.dot(t1) * t1;
    return r1.normalized();
}

}  // namespace

DirectorField::DirectorField(NurbsCurve curve, FrameMethod method, const Vec3& seed_d2, int samples_per_span)
    : curve_(std::move(curve)), method_(method) {
    curve_.validate();
    const auto bp = curve_.basis.breakpoints();
    for (size_t e = 0; e + 1 < bp.size(); ++e)
        for (int i = 0; i < samples_per_span; ++i) xs_.push_back(bp[e] + (bp[e + 1] - bp[e]) * i / samples_per_span);
    xs_.push_back(bp.back());
    for (double x : xs_) {
        const CurveFrame f = curve_frame(curve_, x, false);
        if (method_ == FrameMethod::Frenet && f.kappa < 1e-12)
            throw GeometryError("frenet frame undefined where curvature vanishes");
        pos_.push_back(f.x);
        tan_.push_back(f.t);
    }
    if (method_ == FrameMethod::SmallestRotation) {
        Vec3 d2 = seed_d2 - seed_d2.dot(tan_[0]) * tan_[0];
        if (d2.norm() < 1e-12) throw GeometryError("director seed parallel to tangent");
        d2.normalize();
        d1_.push_back(d2.cross(tan_[0]));
        for (size_t i = 1; i < xs_.size(); ++i)
            d1_.push_back(reflect_step(pos_[i - 1], tan_[i - 1], d1_[i - 1], pos_[i], tan_[i]));
    }
}

std::array<Vec3, 4> DirectorField::eval(double xi) const {
    const CurveFrame f = curve_frame(curve_, xi, method_ == FrameMethod::Frenet);
    std::array<Vec3, 4> out;
    if (method_ == FrameMethod::Frenet) {
        if (f.kappa < 1e-12) throw GeometryError("frenet frame undefined where curvature vanishes");
        const Vec3 N = f.ts / f.kappa;
        const Vec3 B = f.t.cross(N);
        out = {N, B, Vec3(-f.kappa * f.t + f.tau * B), Vec3(-f.tau * N)};
        return out;
    }
    auto it = std::upper_bound(xs_.begin(), xs_.end(), xi);
    size_t k = it == xs_.begin() ? 0 : static_cast<size_t>(it - xs_.begin()) - 1;
    k = std::min(k, xs_.size() - 1);
    const Vec3 d1 = xi == xs_[k] ? d1_[k] : reflect_step(pos_[k], tan_[k], d1_[k], f.x, f.t);
    const Vec3 d2 = f.t.cross(d1);
    out = {d1, d2, Vec3(-d1.dot(f.ts) * f.t), Vec3(-d2.dot(f.ts) * f.t)};
    return out;
}

std::shared_ptr<DirectorField> generate_frame(const NurbsCurve& curve, FrameMethod method, const Vec3& seed_d2) {
    return std::make_shared<DirectorField>(curve, method, seed_d2);
}

std::array<std::vector<Vec3>, 2> project_initial_directors(const DirectorField& field, const SplineSpace& space) {
    const auto g = greville_abscissae(space.kv);
    const int n = space.size();
    const int p = space.degree();
    for (int i = 1; i < n; ++i)
        if (!(g[i] > g[i - 1])) throw std::runtime_error("director projection: repeated Greville abscissae");
    BandedMatrix Nbar(n, p, p);
    Eigen::MatrixXd rhs(n, 6);
    for (int J = 0; J < n; ++J) {
        const BasisTable b = space.eval(g[J], 0);
        for (int k = 0; k <= p; ++k) {
            const int I = b.first + k;
            if (b.ders(0, k) != 0.0) {
                if (!Nbar.in_band(J, I)) throw std::runtime_error("director projection: band overflow");
                Nbar.add(J, I, b.ders(0, k));
            }
        }
        const auto D = field.eval(g[J]);
        rhs.block<1, 3>(J, 0) = D[0].transpose();
        rhs.block<1, 3>(J, 3) = D[1].transpose();
    }
    if (!Nbar.solve_in_place(rhs)) throw std::runtime_error("director projection: singular collocation matrix");
    std::array<std::vector<Vec3>, 2> out;
    for (int I = 0; I < n; ++I) {
        out[0].push_back(rhs.block<1, 3>(I, 0).transpose());
        out[1].push_back(rhs.block<1, 3>(I, 3).transpose());
    }
    return out;
}

InitialGeometry make_initial_geometry(const NurbsCurve& curve, int p_d, FrameMethod method, const Vec3& seed_d2,
                                      DirectorMode mode) {
    curve.validate();
    if (p_d < 1) throw DomainError("director degree must be >= 1");
    InitialGeometry g;
    g.curve = curve;
    g.phi_space = curve.space();
    if (p_d == curve.basis.degree)
        g.dir_space = curve.space();
    else
        g.dir_space = SplineSpace{derive_field_knots(curve.basis, p_d), {}};
    g.mode = mode;
    g.field = generate_frame(curve, method, seed_d2);
    auto D = project_initial_directors(*g.field, g.dir_space);
    g.D1 = std::move(D[0]);
    g.D2 = std::move(D[1]);
    g.length = ParamMap(curve).length();
    return g;
}

Configuration initial_configuration(const InitialGeometry& g) {
    return {g.curve.control_points, g.D1, g.D2};
}

Mat3 rotation_matrix(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Configuration rigid_transform(const Configuration& cfg, const Mat3& L, const Vec3& c) {
    if ((L.transpose() * L - Mat3::Identity()).norm() > 1e-12 || std::abs(L.determinant() - 1.0) > 1e-12)
        throw std::invalid_argument("rigid_transform: not a proper rotation");
    Configuration out = cfg;
    for (auto& p : out.phi) p = L * (p + c);
    for (auto& d : out.d1) d = L * d;
    for (auto& d : out.d2) d = L * d;
    return out;
}

PointOperator point_operator(const InitialGeometry& g, double xi) {
    PointOperator op;
    op.xi = xi;
    const BasisTable bp = g.phi_space.eval(xi, 1);
    Vec3 xp = Vec3::Zero();
    for (int k = 0; k < bp.ders.cols(); ++k) xp += bp.ders(1, k) * g.curve.control_points[bp.first + k];
    op.jt = xp.norm();
    if (!(op.jt > 0.0)) throw GeometryError("degenerate curve: zero tangent");
    op.phi_first = bp.first;
    op.n_phi = static_cast<int>(bp.ders.cols());
    op.Nphi = bp.ders.row(0).transpose();
    op.Nphi_s = bp.ders.row(1).transpose() / op.jt;
    const BasisTable bd = g.dir_space.eval(xi, 1);
    op.dir_first = bd.first;
    op.n_dir = static_cast<int>(bd.ders.cols());
    op.Nd = bd.ders.row(0).transpose();
    op.Nd_s = bd.ders.row(1).transpose() / op.jt;

    op.Q = Eigen::MatrixXd::Zero(15, op.size());
    const Mat3 I = Mat3::Identity();
    for (int i = 0; i < op.n_phi; ++i) op.Q.block<3, 3>(0, 3 * i) = op.Nphi_s[i] * I;
    const int o = 3 * op.n_phi;
    for (int j = 0; j < op.n_dir; ++j) {
        op.Q.block<3, 3>(3, o + 6 * j) = op.Nd[j] * I;
        op.Q.block<3, 3>(6, o + 6 * j + 3) = op.Nd[j] * I;
        op.Q.block<3, 3>(9, o + 6 * j) = op.Nd_s[j] * I;
        op.Q.block<3, 3>(12, o + 6 * j + 3) = op.Nd_s[j] * I;
    }
    if (g.mode == DirectorMode::Continuous) {
        const auto D = g.field->eval(xi);
        Vec3 h1 = Vec3::Zero(), h2 = Vec3::Zero(), h1s = Vec3::Zero(), h2s = Vec3::Zero();
        for (int j = 0; j < op.n_dir; ++j) {
            h1 += op.Nd[j] * g.D1[op.dir_first + j];
            h2 += op.Nd[j] * g.D2[op.dir_first + j];
            h1s += op.Nd_s[j] * g.D1[op.dir_first + j];
            h2s += op.Nd_s[j] * g.D2[op.dir_first + j];
        }
        op.q_off.segment<3>(3) = D[0] - h1;
        op.q_off.segment<3>(6) = D[1] - h2;
        op.q_off.segment<3>(9) = D[2] - h1s;
        op.q_off.segment<3>(12) = D[3] - h2s;
    }
    return op;
}

Eigen::VectorXd gather_local(const Configuration& cfg, const PointOperator& op) {
    Eigen::VectorXd y(op.size());
    for (int i = 0; i < op.n_phi; ++i) y.segment<3>(3 * i) = cfg.phi[op.phi_first + i];
    const int o = 3 * op.n_phi;
    for (int j = 0; j < op.n_dir; ++j) {
        y.segment<3>(o + 6 * j) = cfg.d1[op.dir_first + j];
        y.segment<3>(o + 6 * j + 3) = cfg.d2[op.dir_first + j];
    }
    return y;
}

Vec3 eval_phi(const Configuration& cfg, const PointOperator& op) {
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < op.n_phi; ++i) x += op.Nphi[i] * cfg.phi[op.phi_first + i];
    return x;
}

ConfigPoint eval_config(const Configuration& cfg, const InitialGeometry& g, double xi) {
    const PointOperator op = point_operator(g, xi);
    const Vec15 q = op.q_off + op.Q * gather_local(cfg, op);
    return {eval_phi(cfg, op), q.segment<3>(0), q.segment<3>(3), q.segment<3>(6), q.segment<3>(9), q.segment<3>(12)};
}

Vec15 strain_functional(const Vec15& q) {
    Vec15 e;
    for (int k = 0; k < 15; ++k) {
        const int i = kPair[k][0], j = kPair[k][1];
        const double v = q.segment<3>(3 * i).dot(q.segment<3>(3 * j));
        e[k] = i == j ? 0.5 * v : v;
    }
    return e;
}

Mat15 strain_jacobian(const Vec15& q) {
    Mat15 G = Mat15::Zero();
    for (int k = 0; k < 15; ++k) {
        const int i = kPair[k][0], j = kPair[k][1];
        G.block<1, 3>(k, 3 * i) += q.segment<3>(3 * j).transpose();
        if (i != j) G.block<1, 3>(k, 3 * j) += q.segment<3>(3 * i).transpose();
    }
    return G;
}

Mat15 strain_hessian_contract(const Vec15& r) {
    Mat15 H = Mat15::Zero();
    for (int k = 0; k < 15; ++k) {
        const int i = kPair[k][0], j = kPair[k][1];
        for (int c = 0; c < 3; ++c) {
            H(3 * i + c, 3 * j + c) += r[k];
            if (i != j) H(3 * j + c, 3 * i + c) += r[k];
        }
    }
    return H;
}

Vec15 beam_strain(const Configuration& cfg, const InitialGeometry& g, double xi) {
    const PointOperator op = point_operator(g, xi);
    const Vec15 q = op.q_off + op.Q * gather_local(cfg, op);
    const Vec15 q0 = op.q_off + op.Q * gather_local(initial_configuration(g), op);
    return strain_functional(q) - strain_functional(q0);
}

Eigen::MatrixXd b_operator(const Configuration& cfg, const InitialGeometry& g, double xi) {
    const PointOperator op = point_operator(g, xi);
    const Vec15 q = op.q_off + op.Q * gather_local(cfg, op);
    return strain_jacobian(q) * op.Q;
}

Eigen::MatrixXd geometric_stiffness(const Vec15& r, const PointOperator& op) {
    return op.Q.transpose() * strain_hessian_contract(r) * op.Q;
}

ReferencePoint reference_point(const InitialGeometry& g, double xi) {
    const auto d = curve_point(g.curve, xi, 2);
    const double j = d[1].norm();
    if (!(j > 0.0)) throw GeometryError("degenerate curve: zero tangent");
    ReferencePoint r;
    r.phi0_s = d[1] / j;
    r.phi0_ss = (d[2] - r.phi0_s.dot(d[2]) * r.phi0_s) / (j * j);
    if (g.mode == DirectorMode::Continuous) {
        const auto D = g.field->eval(xi);
        r.D1 = D[0];
        r.D2 = D[1];
        r.D1_s = D[2];
        r.D2_s = D[3];
    } else {
        const BasisTable b = g.dir_space.eval(xi, 1);
        r.D1 = r.D2 = r.D1_s = r.D2_s = Vec3::Zero();
        for (int k = 0; k < b.ders.cols(); ++k) {
            r.D1 += b.ders(0, k) * g.D1[b.first + k];
            r.D2 += b.ders(0, k) * g.D2[b.first + k];
            r.D1_s += b.ders(1, k) / j * g.D1[b.first + k];
            r.D2_s += b.ders(1, k) / j * g.D2[b.first + k];
        }
    }
    r.kappa << r.phi0_ss.dot(r.D1), r.phi0_ss.dot(r.D2);
    return r;
}

}  // namespace beam
