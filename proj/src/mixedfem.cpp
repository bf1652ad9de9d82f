#include "beam/mixedfem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <set>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace beam {

double TimeCurve::operator()(double time) const {
    if (t.empty()) return 0.0;
    if (time <= t.front()) return v.front();
    if (time >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t k = static_cast<size_t>(it - t.begin());
    const double a = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - a) * v[k - 1] + a * v[k];
}

Discretization::Discretization(InitialGeometry geom, SectionOptions sec, MaterialLaw mat)
    : geom_(std::move(geom)), sec_(sec), mat_(mat) {
    sec_.cs.validate();
    const auto& m = sec_.eas;
    eas_ = build_eas_basis(sec_.cs, m.m1, m.m2, m.m3, m.m4);
    const int p = geom_.curve.basis.degree;
    field_ = SplineSpace{derive_field_knots(geom_.curve.basis, p - 1, 1), {}};
    interleaved_ = geom_.phi_space.size() == geom_.dir_space.size() &&
                   geom_.phi_space.kv.knots == geom_.dir_space.kv.knots;
    ny_ = 3 * geom_.phi_space.size() + 6 * geom_.dir_space.size();
    const int ns = std::max(eas_.max_degree() + 1, 3);
    rule_ = gauss_rule(sec_.cs, ns, ns);

    std::vector<double> gx, gw;
    gauss_legendre(p + 1, gx, gw);
    const Configuration cfg0 = initial_configuration(geom_);
    const auto bp = geom_.curve.basis.breakpoints();
    const int ncol = 15 + eas_.d_a;
    const Mat6 C0 = tangent(mat_, Voigt6::Zero());
    for (size_t el = 0; el + 1 < bp.size(); ++el) {
        ElementData E;
        E.xa = bp[el];
        E.xb = bp[el + 1];
        const double h = 0.5 * (E.xb - E.xa);
        for (int q = 0; q <= p; ++q) {
            QPData Q;
            Q.xi = E.xa + h * (gx[q] + 1.0);
            Q.op = point_operator(geom_, Q.xi);
            Q.ds = gw[q] * h * Q.op.jt;
            Q.f_ref = strain_functional(Q.op.q_off + Q.op.Q * gather_local(cfg0, Q.op));
            const BasisTable fb = field_.eval(Q.xi, 0);
            Q.field_first = fb.first;
            Q.Np = fb.ders.row(0).transpose();
            const ReferencePoint ref = reference_point(geom_, Q.xi);
            Q.inertia = inertia_properties(sec_.cs, ref.kappa);
            const int my = Q.op.size();
            Q.Ne = Eigen::Matrix<double, 9, Eigen::Dynamic>::Zero(9, my);
            for (int i = 0; i < Q.op.n_phi; ++i) Q.Ne.block<3, 3>(0, 3 * i) = Q.op.Nphi[i] * Mat3::Identity();
            const int o = 3 * Q.op.n_phi;
            for (int j = 0; j < Q.op.n_dir; ++j) {
                Q.Ne.block<3, 3>(3, o + 6 * j) = Q.op.Nd[j] * Mat3::Identity();
                Q.Ne.block<3, 3>(6, o + 6 * j + 3) = Q.op.Nd[j] * Mat3::Identity();
            }
            for (size_t k = 0; k < rule_.size(); ++k) {
                const double z1 = rule_.z1[k], z2 = rule_.z2[k];
                const double j0 = initial_jacobian(z1, z2, ref.kappa);
                Eigen::MatrixXd Hk(6, ncol);
                Hk.leftCols<15>() = eval_A(z1, z2);
                if (eas_.d_a > 0) Hk.rightCols(eas_.d_a) = eval_gamma(eas_, z1, z2);
                if (!sec_.assume_orthonormal_frame) {
                    const MetricFrame f = metric_frame(ref.D1, ref.D2, ref.phi0_s + z1 * ref.D1_s + z2 * ref.D2_s);
                    Hk = f.T * Hk;
                }
                Q.H.push_back(Hk);
                Q.sw.push_back(rule_.weight[k] * j0);
            }
            if (mat_.kind == MaterialKind::SVK) {
                Q.D = Eigen::MatrixXd::Zero(ncol, ncol);
                for (size_t k = 0; k < Q.H.size(); ++k) Q.D.noalias() += Q.sw[k] * Q.H[k].transpose() * C0 * Q.H[k];
            }
            E.qp.push_back(std::move(Q));
        }
        const PointOperator& op = E.qp.front().op;
        for (int i = 0; i < op.n_phi; ++i)
            for (int c = 0; c < 3; ++c) E.ydofs.push_back(phi_dof(op.phi_first + i, c));
        for (int j = 0; j < op.n_dir; ++j)
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 3; ++c) E.ydofs.push_back(dir_dof(op.dir_first + j, a, c));
        E.field_first = E.qp.front().field_first;
        E.n_field = static_cast<int>(E.qp.front().Np.size());
        E.mass = Eigen::MatrixXd::Zero(E.my(), E.my());
        for (const auto& Q : E.qp) E.mass.noalias() += Q.ds * Q.Ne.transpose() * Q.inertia.mass_matrix() * Q.Ne;
        elems_.push_back(std::move(E));
    }
}

int Discretization::phi_dof(int I, int c) const { return interleaved_ ? 9 * I + c : 3 * I + c; }

int Discretization::dir_dof(int I, int alpha, int c) const {
    return interleaved_ ? 9 * I + 3 + 3 * alpha + c : 3 * geom_.phi_space.size() + 6 * I + 3 * alpha + c;
}

Eigen::VectorXd Discretization::pack(const Configuration& cfg) const {
    Eigen::VectorXd y(ny_);
    for (int I = 0; I < geom_.phi_space.size(); ++I)
        for (int c = 0; c < 3; ++c) y[phi_dof(I, c)] = cfg.phi[I][c];
    for (int I = 0; I < geom_.dir_space.size(); ++I)
        for (int c = 0; c < 3; ++c) {
            y[dir_dof(I, 0, c)] = cfg.d1[I][c];
            y[dir_dof(I, 1, c)] = cfg.d2[I][c];
        }
    return y;
}

Configuration Discretization::unpack(const Eigen::VectorXd& y) const {
    Configuration cfg;
    cfg.phi.resize(geom_.phi_space.size());
    cfg.d1.resize(geom_.dir_space.size());
    cfg.d2.resize(geom_.dir_space.size());
    for (int I = 0; I < geom_.phi_space.size(); ++I)
        for (int c = 0; c < 3; ++c) cfg.phi[I][c] = y[phi_dof(I, c)];
    for (int I = 0; I < geom_.dir_space.size(); ++I)
        for (int c = 0; c < 3; ++c) {
            cfg.d1[I][c] = y[dir_dof(I, 0, c)];
            cfg.d2[I][c] = y[dir_dof(I, 1, c)];
        }
    return cfg;
}

GlobalState Discretization::initial_state() const {
    GlobalState s;
    s.y = pack(initial_configuration(geom_));
    s.r = Eigen::VectorXd::Zero(nr());
    s.e = Eigen::VectorXd::Zero(nr());
    s.V = Eigen::VectorXd::Zero(ny_);
    s.A = Eigen::VectorXd::Zero(ny_);
    s.alpha = Eigen::MatrixXd::Zero(eas_.d_a, n_el());
    return s;
}

double Discretization::dof_key(int g) const {
    auto mid = [](const KnotVector& kv, int I) { return 0.5 * (kv.knots[I] + kv.knots[I + kv.degree + 1]); };
    if (g >= ny_) {
        const int J = ((g - ny_) % nr()) / 15;
        return mid(field_.kv, J);
    }
    if (interleaved_) return mid(geom_.phi_space.kv, g / 9);
    const int nphi3 = 3 * geom_.phi_space.size();
    if (g < nphi3) return mid(geom_.phi_space.kv, g / 3);
    return mid(geom_.dir_space.kv, (g - nphi3) / 6);
}

Eigen::MatrixXd Discretization::global_mass() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ny_, ny_);
    for (const auto& E : elems_)
        for (int i = 0; i < E.my(); ++i)
            for (int j = 0; j < E.my(); ++j) M(E.ydofs[i], E.ydofs[j]) += E.mass(i, j);
    return M;
}

LineDensity line_density(const Discretization& d, const QPData& qp, const Vec15& eps_p, const Eigen::VectorXd& alpha,
                         bool with_hessian) {
    const int n = 15 + d.d_a();
    Eigen::VectorXd x(n);
    x.head<15>() = eps_p;
    if (d.d_a() > 0) x.tail(d.d_a()) = alpha;
    LineDensity out;
    if (d.material().kind == MaterialKind::SVK) {
        out.grad = qp.D * x;
        out.psi = 0.5 * x.dot(out.grad);
        if (with_hessian) out.hess = qp.D;
        return out;
    }
    out.grad = Eigen::VectorXd::Zero(n);
    if (with_hessian) out.hess = Eigen::MatrixXd::Zero(n, n);
    for (size_t k = 0; k < qp.H.size(); ++k) {
        const Voigt6 E = qp.H[k] * x;
        const MaterialResponse m = evaluate(d.material(), E, with_hessian);
        out.psi += qp.sw[k] * m.psi;
        out.grad.noalias() += qp.sw[k] * qp.H[k].transpose() * m.S;
        if (with_hessian) out.hess.noalias() += qp.sw[k] * qp.H[k].transpose() * m.C * qp.H[k];
    }
    return out;
}

ConstitutiveBlocks constitutive_blocks(const Discretization& d, const QPData& qp, const Vec15& eps_p,
                                       const Eigen::VectorXd& alpha) {
    const LineDensity ld = line_density(d, qp, eps_p, alpha, true);
    const int da = d.d_a();
    ConstitutiveBlocks b;
    b.Cee = ld.hess.topLeftCorner<15, 15>();
    b.Cae = ld.hess.bottomLeftCorner(da, 15);
    b.Caa = ld.hess.bottomRightCorner(da, da);
    return b;
}

double eval_weight(Scheme s) { return (s == Scheme::EMC || s == Scheme::Midpoint) ? 0.5 : 1.0; }

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

Vec15 field_at(const Eigen::VectorXd& coeffs, const QPData& q) {
    Vec15 v = Vec15::Zero();
    for (int a = 0; a < q.Np.size(); ++a) v += q.Np[a] * coeffs.segment<15>(15 * (q.field_first + a));
    return v;
}

}  // namespace

ElementSystem element_system(const Discretization& d, int e, const StepInput& in) {
    const ElementData& E = d.elements()[e];
    const GlobalState& cur = *in.cur;
    const GlobalState& prev = in.prev ? *in.prev : cur;
    const double w = eval_weight(in.scheme);
    const bool mid_compat = in.scheme == Scheme::Midpoint;
    const int my = E.my(), mf = E.mf(), da = d.d_a();
    const int oy = 0, orr = my, oe = my + mf, oa = my + 2 * mf;
    const int m = oa + da;

    ElementSystem S;
    S.K = Eigen::MatrixXd::Zero(m, m);
    S.R = Eigen::VectorXd::Zero(m);
    S.Rmag = Eigen::VectorXd::Zero(m);

    const Eigen::VectorXd y1 = gather(cur.y, E.ydofs);
    const Eigen::VectorXd yn = gather(prev.y, E.ydofs);
    const Eigen::VectorXd yw = (1.0 - w) * yn + w * y1;
    const Eigen::VectorXd a1 = da > 0 ? Eigen::VectorXd(cur.alpha.col(e)) : Eigen::VectorXd();
    const Eigen::VectorXd an = da > 0 ? Eigen::VectorXd(prev.alpha.col(e)) : Eigen::VectorXd();
    const Eigen::VectorXd aw = da > 0 ? Eigen::VectorXd((1.0 - w) * an + w * a1) : Eigen::VectorXd();

    for (const QPData& q : E.qp) {
        const Vec15 qw = q.op.q_off + q.op.Q * yw;
        const Eigen::MatrixXd Bw = strain_jacobian(qw) * q.op.Q;
        const Vec15 r1 = field_at(cur.r, q), rn = field_at(prev.r, q);
        const Vec15 e1 = field_at(cur.e, q), en = field_at(prev.e, q);
        const Vec15 rw = (1.0 - w) * rn + w * r1;
        const Vec15 ew = (1.0 - w) * en + w * e1;

        Vec15 eps_c, e_c;
        Eigen::MatrixXd Bc;
        double cw = 1.0;
        if (mid_compat) {
            eps_c = strain_functional(qw) - q.f_ref;
            Bc = Bw;
            e_c = ew;
            cw = w;
        } else {
            const Vec15 q1 = q.op.q_off + q.op.Q * y1;
            eps_c = strain_functional(q1) - q.f_ref;
            Bc = strain_jacobian(q1) * q.op.Q;
            e_c = e1;
        }
        const LineDensity ld = line_density(d, q, ew, aw, true);
        const double ds = q.ds;
        const Eigen::VectorXd fint = ds * (Bw.transpose() * rw);
        S.R.segment(oy, my) += fint;
        S.Rmag.segment(oy, my) += fint.cwiseAbs();
        S.K.block(oy, oy, my, my).noalias() += (ds * w) * (q.op.Q.transpose() * strain_hessian_contract(rw) * q.op.Q);

        const Vec15 gc = eps_c - e_c;
        const Vec15 ge = ld.grad.head<15>() - rw;
        const Mat15 Cee = ld.hess.topLeftCorner<15, 15>();
        const int nf = static_cast<int>(q.Np.size());
        for (int a = 0; a < nf; ++a) {
            const double Na = q.Np[a];
            S.K.block(oy, orr + 15 * a, my, 15) += (ds * w * Na) * Bw.transpose();
            S.R.segment<15>(orr + 15 * a) += ds * Na * gc;
            S.Rmag.segment<15>(orr + 15 * a) += (ds * std::abs(Na)) * (eps_c.cwiseAbs() + e_c.cwiseAbs());
            S.K.block(orr + 15 * a, oy, 15, my) += (ds * cw * Na) * Bc;
            S.R.segment<15>(oe + 15 * a) += ds * Na * ge;
            S.Rmag.segment<15>(oe + 15 * a) +=
                (ds * std::abs(Na)) * (ld.grad.head<15>().cwiseAbs() + rw.cwiseAbs());
            for (int b = 0; b < nf; ++b) {
                const double NN = ds * Na * q.Np[b];
                for (int k = 0; k < 15; ++k) {
                    S.K(orr + 15 * a + k, oe + 15 * b + k) -= cw * NN;
                    S.K(oe + 15 * a + k, orr + 15 * b + k) -= w * NN;
                }
                S.K.block<15, 15>(oe + 15 * a, oe + 15 * b) += (w * NN) * Cee;
            }
            if (da > 0) {
                S.K.block(oe + 15 * a, oa, 15, da) += (ds * w * Na) * ld.hess.topRightCorner(15, da);
                S.K.block(oa, oe + 15 * a, da, 15) += (ds * w * Na) * ld.hess.bottomLeftCorner(da, 15);
            }
        }
        if (da > 0) {
            S.R.segment(oa, da) += ds * ld.grad.tail(da);
            S.Rmag.segment(oa, da) += ds * ld.grad.tail(da).cwiseAbs();
            S.K.block(oa, oa, da, da) += (ds * w) * ld.hess.bottomRightCorner(da, da);
        }
    }

    if (in.scheme != Scheme::QuasiStatic) {
        double c1, c2, c3;
        if (in.scheme == Scheme::Trapezoidal) {
            c1 = 4.0 / (in.dt * in.dt);
            c2 = 4.0 / in.dt;
            c3 = 1.0;
        } else {
            c1 = 2.0 / (in.dt * in.dt);
            c2 = 2.0 / in.dt;
            c3 = 0.0;
        }
        Eigen::VectorXd v = c1 * (y1 - yn) - c2 * gather(prev.V, E.ydofs);
        if (c3 != 0.0) v -= c3 * gather(prev.A, E.ydofs);
        const Eigen::VectorXd fi = E.mass * v;
        S.R.segment(oy, my) += fi;
        S.Rmag.segment(oy, my) += fi.cwiseAbs();
        S.K.block(oy, oy, my, my) += c1 * E.mass;
    }
    return S;
}

std::vector<int> element_dofs(const Discretization& d, int e) {
    const ElementData& E = d.elements()[e];
    std::vector<int> dofs = E.ydofs;
    for (int a = 0; a < E.n_field; ++a)
        for (int k = 0; k < 15; ++k) dofs.push_back(d.r_dof(E.field_first + a, k));
    for (int a = 0; a < E.n_field; ++a)
        for (int k = 0; k < 15; ++k) dofs.push_back(d.e_dof(E.field_first + a, k));
    return dofs;
}

CondensedElement condense_alpha(const Discretization& d, int e, const ElementSystem& sys) {
    CondensedElement ce;
    ce.dofs = element_dofs(d, e);
    const int m = static_cast<int>(ce.dofs.size());
    const int da = d.d_a();
    ce.Rmag = sys.Rmag.head(m);
    if (da == 0) {
        ce.K = sys.K;
        ce.R = sys.R;
        return ce;
    }
    const Eigen::MatrixXd Kaa = sys.K.bottomRightCorner(da, da);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Kaa);
    if (!lu.isInvertible()) throw std::runtime_error("element " + std::to_string(e) + ": singular k_aa");
    ce.KaaInvKax = lu.solve(sys.K.bottomLeftCorner(da, m));
    ce.KaaInvRa = lu.solve(sys.R.tail(da));
    const Eigen::MatrixXd Kxa = sys.K.topRightCorner(m, da);
    ce.K = sys.K.topLeftCorner(m, m) - Kxa * ce.KaaInvKax;
    ce.R = sys.R.head(m) - Kxa * ce.KaaInvRa;
    return ce;
}

Eigen::VectorXd recover_alpha(const CondensedElement& ce, const Eigen::VectorXd& dx_local) {
    if (ce.KaaInvRa.size() == 0) return {};
    return -(ce.KaaInvRa + ce.KaaInvKax * dx_local);
}

int interpolatory_index(const SplineSpace& s, double xi) {
    const BasisTable b = s.eval(xi, 0);
    for (int k = 0; k < b.ders.cols(); ++k)
        if (std::abs(b.ders(0, k) - 1.0) < 1e-12) return b.first + k;
    throw ConfigError("parameter " + std::to_string(xi) + " is not an interpolatory control point");
}

Eigen::VectorXd external_load(const Discretization& d, const BoundaryConditions& bc, double t) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(d.ny());
    for (const auto& L : bc.distributed) {
        const Vec3 f = L.force * L.scale(t);
        for (const auto& E : d.elements())
            for (const auto& q : E.qp)
                for (int i = 0; i < q.op.n_phi; ++i)
                    for (int c = 0; c < 3; ++c) F[d.phi_dof(q.op.phi_first + i, c)] += q.ds * q.op.Nphi[i] * f[c];
    }
    for (const auto& L : bc.end_loads) {
        const double s = L.scale(t);
        const int I = interpolatory_index(d.geometry().phi_space, L.xi);
        for (int c = 0; c < 3; ++c) F[d.phi_dof(I, c)] += s * L.force[c];
        if (L.couple1.squaredNorm() + L.couple2.squaredNorm() > 0.0) {
            const int J = interpolatory_index(d.geometry().dir_space, L.xi);
            for (int c = 0; c < 3; ++c) {
                F[d.dir_dof(J, 0, c)] += s * L.couple1[c];
                F[d.dir_dof(J, 1, c)] += s * L.couple2[c];
            }
        }
    }
    return F;
}

ResolvedDirichlet resolve_dirichlet(const Discretization& d, const BoundaryConditions& bc) {
    ResolvedDirichlet rd;
    std::set<int> seen;
    auto push = [&](int dof, int owner) {
        if (!seen.insert(dof).second)
            throw ConfigError("dirichlet: dof " + std::to_string(dof) + " constrained twice (condition " +
                              std::to_string(owner) + ")");
        rd.dofs.push_back(dof);
        rd.owner.push_back(owner);
    };
    for (size_t i = 0; i < bc.dirichlet.size(); ++i) {
        const auto& c = bc.dirichlet[i];
        ResolvedDirichlet::Point pt;
        pt.phi_cp = interpolatory_index(d.geometry().phi_space, c.xi);
        for (int k = 0; k < 3; ++k)
            if (c.phi[k]) push(d.phi_dof(pt.phi_cp, k), static_cast<int>(i));
        if (c.directors) {
            pt.dir_cp = interpolatory_index(d.geometry().dir_space, c.xi);
            for (int a = 0; a < 2; ++a)
                for (int k = 0; k < 3; ++k) push(d.dir_dof(pt.dir_cp, a, k), static_cast<int>(i));
        }
        rd.points.push_back(pt);
    }
    return rd;
}

Eigen::VectorXd ResolvedDirichlet::values(const Discretization& d, const BoundaryConditions& bc, double t) const {
    Eigen::VectorXd v(dofs.size());
    const auto& g = d.geometry();
    size_t k = 0;
    for (size_t i = 0; i < bc.dirichlet.size(); ++i) {
        const auto& c = bc.dirichlet[i];
        const auto& pt = points[i];
        const Mat3 L = rotation_matrix(c.axis, c.angle(t));
        const Vec3 p0 = g.curve.control_points[pt.phi_cp];
        const Vec3 ctr = c.center ? *c.center : p0;
        const Vec3 phi = ctr + L * (p0 + c.translation_scale(t) * c.translation - ctr);
        for (int m = 0; m < 3; ++m)
            if (c.phi[m]) v[k++] = phi[m];
        if (c.directors) {
            const Vec3 d1 = L * g.D1[pt.dir_cp], d2 = L * g.D2[pt.dir_cp];
            for (int m = 0; m < 3; ++m) v[k++] = d1[m];
            for (int m = 0; m < 3; ++m) v[k++] = d2[m];
        }
    }
    return v;
}

SystemLayout::SystemLayout(const Discretization& d, const std::vector<int>& constrained) {
    const int n = d.n_total();
    std::vector<char> fixed(n, 0);
    for (int g : constrained) fixed[g] = 1;
    std::vector<int> order;
    for (int g = 0; g < n; ++g)
        if (!fixed[g]) order.push_back(g);
    std::vector<double> key(n);
    for (int g = 0; g < n; ++g) key[g] = d.dof_key(g);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    pos_to_dof_ = order;
    dof_to_pos_.assign(n, -1);
    for (size_t p = 0; p < order.size(); ++p) dof_to_pos_[order[p]] = static_cast<int>(p);
    for (int e = 0; e < d.n_el(); ++e) {
        int lo = n, hi = -1;
        for (int g : element_dofs(d, e)) {
            const int p = dof_to_pos_[g];
            if (p < 0) continue;
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        if (hi >= lo) kl_ = ku_ = std::max(kl_, hi - lo);
    }
}

int configured_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* s = std::getenv("BEAMSOLVE_THREADS")) {
        const int cap = std::atoi(s);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(n, 1);
#else
    return 1;
#endif
}

AssembledSystem assemble(const Discretization& d, const SystemLayout& layout, const StepInput& in) {
    AssembledSystem as;
    const int ne = d.n_el();
    as.elems.resize(ne);
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(configured_threads())
    for (int e = 0; e < ne; ++e) {
        try {
            as.elems[e] = condense_alpha(d, e, element_system(d, e, in));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    as.K = BandedMatrix(layout.n(), layout.kl(), layout.ku());
    as.R = Eigen::VectorXd::Zero(d.n_total());
    as.Rmag = Eigen::VectorXd::Zero(d.n_total());
    for (const auto& ce : as.elems) {
        const int m = static_cast<int>(ce.dofs.size());
        for (int i = 0; i < m; ++i) {
            as.R[ce.dofs[i]] += ce.R[i];
            as.Rmag[ce.dofs[i]] += ce.Rmag[i];
            const int pi = layout.pos(ce.dofs[i]);
            if (pi < 0) continue;
            for (int j = 0; j < m; ++j) {
                const int pj = layout.pos(ce.dofs[j]);
                if (pj >= 0 && ce.K(i, j) != 0.0) as.K.add(pi, pj, ce.K(i, j));
            }
        }
    }
    return as;
}

Eigen::MatrixXd assemble_dense_reference(const Discretization& d, const StepInput& in, Eigen::VectorXd& R) {
    const int n = d.n_total();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    R = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < d.n_el(); ++e) {
        const CondensedElement ce = condense_alpha(d, e, element_system(d, e, in));
        for (size_t i = 0; i < ce.dofs.size(); ++i) {
            R[ce.dofs[i]] += ce.R[i];
            for (size_t j = 0; j < ce.dofs.size(); ++j) K(ce.dofs[i], ce.dofs[j]) += ce.K(i, j);
        }
    }
    return K;
}

Eigen::VectorXd internal_force(const Discretization& d, const GlobalState& s) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(d.ny());
    for (const auto& E : d.elements()) {
        const Eigen::VectorXd y = gather(s.y, E.ydofs);
        Eigen::VectorXd fe = Eigen::VectorXd::Zero(E.my());
        for (const auto& q : E.qp) {
            const Vec15 qq = q.op.q_off + q.op.Q * y;
            fe += q.ds * (strain_jacobian(qq) * q.op.Q).transpose() * field_at(s.r, q);
        }
        for (int i = 0; i < E.my(); ++i) f[E.ydofs[i]] += fe[i];
    }
    return f;
}

}  // namespace beam
