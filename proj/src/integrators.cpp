#include "beam/integrators.hpp"

#include <cmath>
#include <cstdio>

namespace beam {

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

double arc_length_to(const NurbsCurve& c, double xi) {
    std::vector<double> gx, gw;
    gauss_legendre(c.basis.degree + 6, gx, gw);
    const auto bp = c.basis.breakpoints();
    double s = 0.0;
    for (size_t e = 0; e + 1 < bp.size() && bp[e] < xi; ++e) {
        const double a = bp[e], b = std::min(bp[e + 1], xi), h = 0.5 * (b - a);
        for (size_t q = 0; q < gx.size(); ++q) s += gw[q] * h * curve_point(c, a + h * (gx[q] + 1.0), 1)[1].norm();
    }
    return s;
}

}  // namespace

double strain_energy(const Discretization& d, const GlobalState& s) {
    double U = 0.0;
    for (int e = 0; e < d.n_el(); ++e) {
        const Eigen::VectorXd a = d.d_a() > 0 ? Eigen::VectorXd(s.alpha.col(e)) : Eigen::VectorXd();
        for (const auto& q : d.elements()[e].qp) U += q.ds * line_density(d, q, field_at(s.e, q), a, false).psi;
    }
    return U;
}

DiagnosticsRecord diagnostics(const Discretization& d, const BoundaryConditions& bc, const GlobalState& s, double t) {
    DiagnosticsRecord r;
    r.t = t;
    for (const auto& E : d.elements()) {
        const Eigen::VectorXd y = gather(s.y, E.ydofs), V = gather(s.V, E.ydofs);
        for (const auto& q : E.qp) {
            Eigen::Matrix<double, 9, 1> x = q.Ne * y;
            x.segment<6>(3) += q.op.q_off.segment<6>(3);
            const Eigen::Matrix<double, 9, 1> v = q.Ne * V;
            const InertiaProps& I = q.inertia;
            const Vec3 vp = v.segment<3>(0), v1 = v.segment<3>(3), v2 = v.segment<3>(6);
            const Vec3 p = I.rhoA * vp + I.I1 * v1 + I.I2 * v2;
            const Vec3 m1 = I.I1 * vp + I.I11 * v1 + I.I12 * v2;
            const Vec3 m2 = I.I2 * vp + I.I12 * v1 + I.I22 * v2;
            r.L += q.ds * p;
            r.J += q.ds * (Vec3(x.segment<3>(0)).cross(p) + Vec3(x.segment<3>(3)).cross(m1) +
                           Vec3(x.segment<3>(6)).cross(m2));
            r.K += 0.5 * q.ds * (vp.dot(p) + v1.dot(m1) + v2.dot(m2));
        }
    }
    r.U = strain_energy(d, s);
    r.W = external_load(d, bc, t).dot(s.y);
    r.E = r.K + r.U - r.W;
    r.Estar = r.E;
    return r;
}

std::vector<double> energy_consistency_check(const std::vector<DiagnosticsRecord>& h) {
    double m = 0.0;
    for (const auto& r : h) m = std::max(m, std::abs(r.E));
    std::vector<double> out;
    for (const auto& r : h) out.push_back(m > 0.0 ? std::abs(r.E - r.Estar) / m : 0.0);
    return out;
}

Eigen::VectorXd project_velocity(const Discretization& d, const std::function<Vec3(double)>& v_phi) {
    const auto& g = d.geometry();
    const auto gr = greville_abscissae(g.phi_space.kv);
    const int n = g.phi_space.size();
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs(n, 3);
    for (int J = 0; J < n; ++J) {
        const BasisTable b = g.phi_space.eval(gr[J], 0);
        for (int k = 0; k < b.ders.cols(); ++k) N(J, b.first + k) = b.ders(0, k);
        rhs.row(J) = v_phi(arc_length_to(g.curve, gr[J])).transpose();
    }
    const Eigen::MatrixXd c = N.partialPivLu().solve(rhs);
    Eigen::VectorXd V = Eigen::VectorXd::Zero(d.ny());
    for (int I = 0; I < n; ++I)
        for (int k = 0; k < 3; ++k) V[d.phi_dof(I, k)] = c(I, k);
    return V;
}

Solver::Solver(const Discretization& d, BoundaryConditions bc, Scheme scheme, NewtonSettings ns)
    : d_(d), bc_(std::move(bc)), scheme_(scheme), ns_(ns) {
    dir_ = resolve_dirichlet(d_, bc_);
    layout_ = std::make_unique<SystemLayout>(d_, dir_.dofs);
    state_ = d_.initial_state();
    const Eigen::VectorXd v0 = dir_.values(d_, bc_, 0.0);
    for (size_t k = 0; k < dir_.dofs.size(); ++k) state_.y[dir_.dofs[k]] = v0[k];
    last_R_ = Eigen::VectorXd::Zero(d_.n_total());
    init_acceleration();
    Estar_ = diagnostics(d_, bc_, state_, t_).E;
}

void Solver::set_velocity(const Eigen::VectorXd& V) {
    state_.V = V;
    init_acceleration();
    Estar_ = diagnostics(d_, bc_, state_, t_).E;
}

void Solver::init_acceleration() {
    state_.A.setZero();
    if (scheme_ != Scheme::Trapezoidal) return;
    const Eigen::VectorXd f = external_load(d_, bc_, t_) - internal_force(d_, state_);
    std::vector<int> freed;
    std::vector<char> fixed(d_.ny(), 0);
    for (int g : dir_.dofs) fixed[g] = 1;
    for (int g = 0; g < d_.ny(); ++g)
        if (!fixed[g]) freed.push_back(g);
    const Eigen::MatrixXd M = d_.global_mass();
    Eigen::MatrixXd Mf(freed.size(), freed.size());
    Eigen::VectorXd ff(freed.size());
    for (size_t i = 0; i < freed.size(); ++i) {
        ff[i] = f[freed[i]];
        for (size_t j = 0; j < freed.size(); ++j) Mf(i, j) = M(freed[i], freed[j]);
    }
    const Eigen::VectorXd a = Mf.ldlt().solve(ff);
    for (size_t i = 0; i < freed.size(); ++i) state_.A[freed[i]] = a[i];
}

StepInfo Solver::try_step(double dt) { return step_to(t_ + dt); }

StepInfo Solver::step_to(double t1) {
    StepInfo info;
    const double dt = t1 - t_;
    const int ny = d_.ny(), nr = d_.nr();
    GlobalState cur = state_;
    const Eigen::VectorXd lift = dir_.values(d_, bc_, t1);
    for (size_t k = 0; k < dir_.dofs.size(); ++k) cur.y[dir_.dofs[k]] = lift[k];
    const bool midpoint_load = scheme_ == Scheme::EMC || scheme_ == Scheme::Midpoint;
    const Eigen::VectorXd F = external_load(d_, bc_, midpoint_load ? t_ + 0.5 * dt : t1);
    const StepInput in{scheme_, dt, &state_, &cur};
    const SystemLayout& L = *layout_;

    const double sy = d_.force_scale(), sr = d_.length_scale(), se = sy * sr;
    int polished = 0;
    for (int it = 0;; ++it) {
        AssembledSystem as;
        try {
            as = assemble(d_, L, in);
        } catch (const std::exception& ex) {
            info.failure = ex.what();
            return info;
        }
        Eigen::VectorXd R = as.R;
        R.head(ny) -= F;
        double n[3] = {0, 0, 0}, ref[3] = {0, 0, 0};
        for (int p = 0; p < L.n(); ++p) {
            const int g = L.dof(p);
            const int b = g < ny ? 0 : (g < ny + nr ? 1 : 2);
            n[b] += R[g] * R[g];
            ref[b] += as.Rmag[g] * as.Rmag[g] + (b == 0 ? F[g] * F[g] : 0.0);
        }
        bool finite = true, conv = true, zero = true;
        const double scale[3] = {sy, sr, se};
        for (int b = 0; b < 3; ++b) {
            n[b] = std::sqrt(n[b]);
            ref[b] = std::sqrt(ref[b]);
            finite = finite && std::isfinite(n[b]);
            conv = conv && n[b] <= ns_.tol_rel * ref[b] + ns_.tol_abs * scale[b];
            zero = zero && n[b] == 0.0;
        }
        info.residual = n[0] / sy + n[1] / sr + n[2] / se;
        if (ns_.trace) std::fprintf(stderr, "  it %d  ry %.3e/%.3e rr %.3e/%.3e re %.3e/%.3e\n", it, n[0], ref[0], n[1], ref[1], n[2], ref[2]);
        if (!finite) {
            info.failure = "non-finite residual";
            return info;
        }
        if (conv && (polished >= ns_.polish || zero)) {
            info.converged = true;
            last_R_ = R;
            last_K_ = std::move(as.K);
            break;
        }
        if (conv) ++polished;
        if (it >= ns_.max_iter) {
            info.failure = "iteration limit";
            return info;
        }
        Eigen::MatrixXd rhs(L.n(), 1);
        for (int p = 0; p < L.n(); ++p) rhs(p, 0) = -R[L.dof(p)];
        if (!as.K.solve_in_place(rhs)) {
            info.failure = "singular tangent";
            return info;
        }
        Eigen::VectorXd dz = Eigen::VectorXd::Zero(d_.n_total());
        for (int p = 0; p < L.n(); ++p) dz[L.dof(p)] = rhs(p, 0);
        if (!dz.allFinite()) {
            info.failure = "non-finite increment";
            return info;
        }
        cur.y += dz.head(ny);
        cur.r += dz.segment(ny, nr);
        cur.e += dz.segment(ny + nr, nr);
        for (int e = 0; e < d_.n_el(); ++e) {
            const auto& ce = as.elems[e];
            if (d_.d_a() > 0) cur.alpha.col(e) += recover_alpha(ce, gather(dz, ce.dofs));
        }
        ++info.iterations;
    }

    const Eigen::VectorXd& yn = state_.y;
    switch (scheme_) {
        case Scheme::QuasiStatic:
            break;
        case Scheme::EMC:
        case Scheme::Midpoint:
            cur.V = (2.0 / dt) * (cur.y - yn) - state_.V;
            break;
        case Scheme::Trapezoidal:
            cur.A = (4.0 / (dt * dt)) * (cur.y - yn - dt * state_.V) - state_.A;
            cur.V = state_.V + 0.5 * dt * (state_.A + cur.A);
            break;
    }
    const double En = diagnostics(d_, bc_, state_, t_).E;
    const Eigen::VectorXd Fn = external_load(d_, bc_, t_), F1 = external_load(d_, bc_, t1);
    Estar_ = En - 0.5 * (F1 - Fn).dot(cur.y + yn);
    state_ = std::move(cur);
    t_ = t1;
    last_iters_ = info.iterations;
    return info;
}

std::vector<DiagnosticsRecord> Solver::advance(double dt) { return advance_to(t_ + dt); }

std::vector<DiagnosticsRecord> Solver::advance_to(double t_end) {
    std::vector<DiagnosticsRecord> out;
    const double dt = t_end - t_;
    const double h_min = dt / std::pow(2.0, ns_.max_halvings);
    double h = dt;
    int easy = 0;
    std::string last_failure;
    while (t_end - t_ > 1e-12 * std::abs(dt)) {
        const double t1 = h < t_end - t_ ? t_ + h : t_end;
        const double step = t1 - t_;
        const StepInfo info = step_to(t1);
        if (!info.converged) {
            last_failure = info.failure;
            h *= 0.5;
            easy = 0;
            if (h < h_min * (1.0 - 1e-12))
                throw NonConvergence("no convergence at t=" + std::to_string(t_) + " (" + last_failure + ")");
            continue;
        }
        DiagnosticsRecord r = current_diagnostics();
        r.dt = step;
        r.iterations = info.iterations;
        out.push_back(r);
        if (h < dt && ++easy >= 5) {
            h = std::min(2.0 * h, dt);
            easy = 0;
        }
    }
    return out;
}

DiagnosticsRecord Solver::current_diagnostics() const {
    DiagnosticsRecord r = diagnostics(d_, bc_, state_, t_);
    r.Estar = Estar_;
    r.iterations = last_iters_;
    return r;
}

std::vector<ReactionRecord> Solver::reactions() const {
    std::vector<ReactionRecord> out;
    for (size_t i = 0; i < bc_.dirichlet.size(); ++i) {
        const auto& c = bc_.dirichlet[i];
        const auto& pt = dir_.points[i];
        ReactionRecord r;
        r.label = c.label;
        for (int k = 0; k < 3; ++k) r.force[k] = last_R_[d_.phi_dof(pt.phi_cp, k)];
        if (pt.dir_cp >= 0) {
            for (int a = 0; a < 2; ++a) {
                Vec3 f, dv;
                for (int k = 0; k < 3; ++k) {
                    f[k] = last_R_[d_.dir_dof(pt.dir_cp, a, k)];
                    dv[k] = state_.y[d_.dir_dof(pt.dir_cp, a, k)];
                }
                r.moment += dv.cross(f);
            }
        }
        r.axial_moment = c.axis.normalized().dot(r.moment);
        out.push_back(r);
    }
    return out;
}

std::vector<std::tuple<int, int, double>> Solver::tangent_triplets() const {
    std::vector<std::tuple<int, int, double>> t;
    const SystemLayout& L = *layout_;
    for (int j = 0; j < last_K_.n(); ++j)
        for (int i = std::max(0, j - last_K_.ku()); i <= std::min(last_K_.n() - 1, j + last_K_.kl()); ++i) {
            const double v = last_K_(i, j);
            if (v != 0.0) t.emplace_back(L.dof(i), L.dof(j), v);
        }
    return t;
}

}  // namespace beam
