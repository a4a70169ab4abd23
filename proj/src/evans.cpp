#include "vevans/evans.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "vevans/errors.hpp"
#include "vevans/ode.hpp"

namespace vevans {

namespace {

std::vector<int> evans_components(Variant v) {
    switch (v) {
        case Variant::Compressible3D: return {0, 1, 2};
        case Variant::Compressible2D: return {1, 2};
        case Variant::Compressible1D: return {2};
        case Variant::Transverse: return {0};
        case Variant::Shear2D: return {0, 1};
        case Variant::Shear1D: return {0};
    }
    return {};
}

}  // namespace

EvansSystem::EvansSystem(const ModelVariant& variant, std::shared_ptr<const ProfileGrid> grid,
                         const ModelVariant& grid_variant, const ElasticPotential& pot)
    : variant_(variant), grid_variant_(grid_variant), grid_(std::move(grid)), pot_(pot),
      components_(evans_components(variant.tag)), shear_(variant.shear() && variant.tag != Variant::Transverse) {
    bool ok = grid_variant.tag == variant.tag ||
              (grid_variant.tag == Variant::Compressible2D &&
               (variant.tag == Variant::Transverse || variant.tag == Variant::Compressible3D));
    if (!ok) throw ContractViolation("profile variant " + grid_variant.name() + " cannot drive the " +
                                     variant.name() + " Evans system");
    if (grid_->s == 0.0) throw DomainError("Evans system needs s != 0");
    if (grid_->size() < 2) throw ContractViolation("profile grid is empty");
    if (!shear_) {
        for (const auto& a : grid_->a_vals)
            if (grid_variant_.embed(a)[2] <= 0.0) throw DomainError("Evans system needs abar3 > 0");
    }
}

void EvansSystem::profile3(double z, Vec3& a3, Vec3& ap3) const {
    Vec a, ap;
    const auto& g = *grid_;
    if (z <= -g.L) {
        a = g.alpha;
        ap = Vec::Zero(a.size());
    } else if (z >= g.L) {
        a = g.a_plus;
        ap = Vec::Zero(a.size());
    } else {
        g.interpolate(z, a, ap);
    }
    a3 = grid_variant_.embed(a);
    ap3.setZero();
    auto idx = grid_variant_.free_indices();
    for (size_t i = 0; i < idx.size(); ++i) ap3[idx[i]] = ap[i];
}

MatC EvansSystem::build(const Vec3& abar, const Vec3& abp, cd lambda) const {
    const double s = grid_->s;
    const int n = int(components_.size());
    MatC A = MatC::Zero(3 * n, 3 * n);
    Mat3 M = hess_potential3(abar, pot_);
    if (shear_) {
        for (int i = 0; i < n; ++i) {
            int j = components_[i], o = 3 * i;
            A(o, o) = lambda / s;
            A(o, o + 2) = -1.0 / s;
            A(o + 1, o + 2) = 1.0;
            A(o + 2, o + 1) = lambda;
            A(o + 2, o + 2) += -s;
            for (int q = 0; q < n; ++q) {
                int k = components_[q], ok = 3 * q;
                A(o + 2, ok) += -lambda * M(j, k) / s;
                A(o + 2, ok + 2) += M(j, k) / s;
            }
        }
        return A;
    }
    const double a3 = abar[2];
    const double d[3] = {1.0, 1.0, 2.0};
    int o3 = -1;  // block of component 3, if present
    for (int i = 0; i < n; ++i)
        if (components_[i] == 2) o3 = 3 * i;
    for (int i = 0; i < n; ++i) {
        int j = components_[i], o = 3 * i;
        double c = a3 / d[j];
        A(o, o + 1) = lambda;
        A(o, o + 2) = -s;
        A(o + 1, o + 2) = 1.0;
        A(o + 2, o) = -c * lambda / s;
        A(o + 2, o + 1) = c * lambda;
        A(o + 2, o + 2) += lambda / s - c * s;
        for (int q = 0; q < n; ++q) {
            int k = components_[q];
            A(o + 2, 3 * q + 2) += c * M(j, k) / s;
        }
        // -a3' bbar_j' / (s abar3) with bbar_j' = -s abar_j'
        if (o3 >= 0) A(o + 2, o3 + 2) += abp[j] / a3;
    }
    return A;
}

MatC EvansSystem::matrix(double z, cd lambda) const {
    Vec3 a, ap;
    profile3(z, a, ap);
    return build(a, ap, lambda);
}

MatC EvansSystem::limit(Side side, cd lambda) const {
    Vec3 a = grid_variant_.embed(side == Side::Plus ? grid_->a_plus : grid_->alpha);
    return build(a, Vec3::Zero(), lambda);
}

EvansSystem assemble_evans(const ModelVariant& variant, std::shared_ptr<const ProfileGrid> grid,
                           const ModelVariant& grid_variant, const ElasticPotential& pot) {
    return EvansSystem(variant, std::move(grid), grid_variant, pot);
}

namespace {

// Swap adjacent diagonal entries k, k+1 of the upper-triangular T, updating Q.
void schur_swap(MatC& T, MatC& Q, int k) {
    cd a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
    cd x1 = b, x2 = c - a;
    double nrm = std::hypot(std::abs(x1), std::abs(x2));
    if (nrm == 0.0) return;
    x1 /= nrm;
    x2 /= nrm;
    const int n = int(T.rows());
    for (int j = 0; j < n; ++j) {
        cd tk = T(k, j), tk1 = T(k + 1, j);
        T(k, j) = std::conj(x1) * tk + std::conj(x2) * tk1;
        T(k + 1, j) = -x2 * tk + x1 * tk1;
    }
    for (int i = 0; i < n; ++i) {
        cd tk = T(i, k), tk1 = T(i, k + 1);
        T(i, k) = tk * x1 + tk1 * x2;
        T(i, k + 1) = -tk * std::conj(x2) + tk1 * std::conj(x1);
        cd qk = Q(i, k), qk1 = Q(i, k + 1);
        Q(i, k) = qk * x1 + qk1 * x2;
        Q(i, k + 1) = -qk * std::conj(x2) + qk1 * std::conj(x1);
    }
    T(k + 1, k) = 0.0;
}

// Schur form with diagonal sorted by key (ascending).
template <class Key>
void sorted_schur(const MatC& A, MatC& T, MatC& Q, Key key) {
    Eigen::ComplexSchur<MatC> cs(A);
    T = cs.matrixT();
    Q = cs.matrixU();
    const int n = int(A.rows());
    for (int pass = 0; pass < n; ++pass) {
        bool swapped = false;
        for (int k = 0; k + 1 < n; ++k) {
            if (key(T(k, k)) > key(T(k + 1, k + 1))) {
                schur_swap(T, Q, k);
                swapped = true;
            }
        }
        if (!swapped) break;
    }
}

double side_key(Side side, cd mu) { return side == Side::Plus ? mu.real() : -mu.real(); }

// Key of each eigenvalue: Re mu, or Re (mu + eta mu') when the derivative is available.
std::function<double(cd)> ranking(const MatC& A, Side side, const MatC* dA) {
    if (!dA) return [side](cd mu) { return side_key(side, mu); };
    const double eta = 1e-6;
    Eigen::ComplexEigenSolver<MatC> es(A);
    MatC V = es.eigenvectors();
    Eigen::JacobiSVD<MatC> svd(V);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10 * sv(0)) return [side](cd mu) { return side_key(side, mu); };
    VecC d = (V.inverse() * (*dA) * V).diagonal();
    VecC mu = es.eigenvalues();
    return [side, mu, d, eta](cd m) {
        Eigen::Index j;
        (mu.array() - m).abs().minCoeff(&j);
        return side_key(side, mu(j) + eta * d(j));
    };
}

}  // namespace

Split spectral_split(const MatC& A, Side side, double zero_tol) {
    MatC T, Q;
    sorted_schur(A, T, Q, [&](cd mu) { return side_key(side, mu); });
    Split out;
    for (int i = 0; i < T.rows(); ++i) {
        if (std::abs(T(i, i).real()) < zero_tol)
            throw SplittingDegenerate("eigenvalue " + std::to_string(T(i, i).real()) + std::string("+i") +
                                      std::to_string(T(i, i).imag()) + " on the imaginary axis");
        if (side_key(side, T(i, i)) < 0) {
            ++out.dim;
            out.trace += T(i, i);
        }
    }
    out.basis = Q.leftCols(out.dim);
    return out;
}

Split spectral_split_k(const MatC& A, Side side, int k, double axis_tol, const MatC* dA) {
    MatC T, Q;
    auto key = ranking(A, side, dA);
    sorted_schur(A, T, Q, key);
    const int n = int(A.rows());
    if (k < 0 || k > n) throw ContractViolation("subspace dimension out of range");
    double scale = 1.0 + A.norm();
    if (k > 0 && key(T(k - 1, k - 1)) > axis_tol)
        throw SplittingDegenerate("selected eigenvalue lies on the wrong side of the imaginary axis");
    if (k < n && key(T(k, k)) < -axis_tol)
        throw SplittingDegenerate("unselected eigenvalue lies on the selected side of the imaginary axis");
    if (k > 0 && k < n && key(T(k, k)) - key(T(k - 1, k - 1)) <= 1e-12 * scale)
        throw SplittingDegenerate("no spectral gap between the selected and remaining eigenvalues");
    Split out;
    out.dim = k;
    for (int i = 0; i < k; ++i) out.trace += T(i, i);
    out.basis = Q.leftCols(k);
    return out;
}

MatC spectral_projector(const MatC& A, Side side, int k, const MatC* dA) {
    MatC R = spectral_split_k(A, side, k, 1e-8, dA).basis;
    MatC dAh;
    if (dA) dAh = dA->adjoint();
    MatC Lb = spectral_split_k(A.adjoint(), side, k, 1e-8, dA ? &dAh : nullptr).basis;
    MatC G = Lb.adjoint() * R;
    Eigen::JacobiSVD<MatC> svd(G);
    if (k > 0 && svd.singularValues().minCoeff() < 1e-12)
        throw ProjectorFailure("L^H R is singular: left and right subspaces are not complementary");
    return R * G.inverse() * Lb.adjoint();
}

namespace {

// The limits are affine in lambda.
MatC limit_derivative(const EvansSystem& sys, Side side) { return sys.limit(side, 1.0) - sys.limit(side, 0.0); }

MatC real_range_basis(const MatC& P, int k) {
    Mat Pr = P.real();
    Eigen::JacobiSVD<Mat> svd(Pr, Eigen::ComputeFullU);
    Mat U = svd.matrixU().leftCols(k);
    // Deterministic orientation: the largest entry of each column positive.
    for (int j = 0; j < k; ++j) {
        Eigen::Index imax;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0) U.col(j) *= -1.0;
    }
    return U.cast<cd>();
}

}  // namespace

AnalyticBasisState real_basis_state(const EvansSystem& sys, double lambda, int kp, int km) {
    AnalyticBasisState st;
    st.lambda = lambda;
    MatC dp = limit_derivative(sys, Side::Plus), dm = limit_derivative(sys, Side::Minus);
    st.projector_plus = spectral_projector(sys.limit(Side::Plus, lambda), Side::Plus, kp, &dp);
    st.projector_minus = spectral_projector(sys.limit(Side::Minus, lambda), Side::Minus, km, &dm);
    st.basis_plus = real_range_basis(st.projector_plus, kp);
    st.basis_minus = real_range_basis(st.projector_minus, km);
    return st;
}

namespace {

// Applies the discrete Kato step on [from, to], bisecting until consecutive projectors
// differ by at most max_dp.
void kato_adaptive(MatC& R, const std::function<MatC(cd)>& projector, cd from, cd to, const MatC& P0,
                   const MatC& P1, double max_dp, int depth) {
    if ((P1 - P0).norm() > max_dp) {
        if (depth >= 40)
            throw ProjectorFailure("spectral projector is not continuous along the path (eigenvalue crossing)");
        cd mid = 0.5 * (from + to);
        MatC Pm = projector(mid);
        kato_adaptive(R, projector, from, mid, P0, Pm, max_dp, depth + 1);
        kato_adaptive(R, projector, mid, to, Pm, P1, max_dp, depth + 1);
        return;
    }
    const int n = int(R.rows());
    MatC I = MatC::Identity(n, n);
    R = P1 * (I + 0.5 * P0 * (I - P1)) * R;
}

}  // namespace

MatC kato_step(const MatC& R0, const std::function<MatC(cd)>& projector, cd from, cd to, double max_dp) {
    MatC R = R0;
    kato_adaptive(R, projector, from, to, projector(from), projector(to), max_dp, 0);
    return R;
}

std::vector<MatC> kato_transport(const MatC& R0, const std::function<MatC(cd)>& projector,
                                 const std::vector<cd>& path, double max_dp) {
    std::vector<MatC> out;
    if (path.empty()) return out;
    out.push_back(R0);
    for (size_t i = 1; i < path.size(); ++i)
        out.push_back(kato_step(out.back(), projector, path[i - 1], path[i], max_dp));
    return out;
}

AnalyticBasisState kato_transport_state(const AnalyticBasisState& from, const EvansSystem& sys, cd to,
                                        double max_dp) {
    int kp = int(from.basis_plus.cols()), km = int(from.basis_minus.cols());
    MatC dp = limit_derivative(sys, Side::Plus), dm = limit_derivative(sys, Side::Minus);
    auto pp = [&](cd l) { return spectral_projector(sys.limit(Side::Plus, l), Side::Plus, kp, &dp); };
    auto pm = [&](cd l) { return spectral_projector(sys.limit(Side::Minus, l), Side::Minus, km, &dm); };
    AnalyticBasisState st;
    st.lambda = to;
    st.basis_plus = kato_step(from.basis_plus, pp, from.lambda, to, max_dp);
    st.basis_minus = kato_step(from.basis_minus, pm, from.lambda, to, max_dp);
    st.projector_plus = pp(to);
    st.projector_minus = pm(to);
    return st;
}

namespace {

// Thin QR with positive real diagonal in R; returns log det R.
cd orthonormalize(MatC& X) {
    const int k = int(X.cols());
    Eigen::HouseholderQR<MatC> qr(X);
    MatC Q = qr.householderQ() * MatC::Identity(X.rows(), k);
    MatC R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    cd logdet = 0.0;
    for (int j = 0; j < k; ++j) {
        cd d = R(j, j);
        double m = std::abs(d);
        if (m == 0.0) throw InternalConsistencyError("frame columns collapsed");
        Q.col(j) *= d / m;
        logdet += std::log(m);
    }
    X = Q;
    return logdet;
}

void pack(const MatC& W, cd log_r, State& x) {
    const int sz = int(W.size());
    x.resize(2 * sz + 2);
    for (int i = 0; i < sz; ++i) {
        x[2 * i] = W.data()[i].real();
        x[2 * i + 1] = W.data()[i].imag();
    }
    x[2 * sz] = log_r.real();
    x[2 * sz + 1] = log_r.imag();
}

void unpack(const State& x, MatC& W, cd& log_r) {
    const int sz = int(W.size());
    for (int i = 0; i < sz; ++i) W.data()[i] = cd(x[2 * i], x[2 * i + 1]);
    log_r = cd(x[2 * sz], x[2 * sz + 1]);
}

}  // namespace

SubspaceFrame initialize_at_infinity(const MatC& A_limit, const MatC& basis, Side side, double L) {
    SubspaceFrame f;
    f.side = side;
    f.k = int(basis.cols());
    f.omega = basis;
    cd logdet = f.k > 0 ? orthonormalize(f.omega) : cd(0.0);
    cd tr = (f.omega.adjoint() * A_limit * f.omega).trace();
    f.log_r = logdet + (side == Side::Plus ? tr * L : -tr * L);
    return f;
}

SubspaceFrame drury_integrate(const std::function<MatC(double)>& A, SubspaceFrame frame, double from_z,
                              double to_z, const DruryOptions& opts) {
    if (from_z == to_z || frame.k == 0) return frame;
    const int N = int(frame.omega.rows()), k = frame.k;
    MatC W(N, k);
    cd lr;
    auto rhs = [&](const State& x, State& dx, double z) {
        MatC Om(N, k);
        cd l;
        unpack(x, Om, l);
        MatC AO = A(z) * Om;
        MatC H = Om.adjoint() * AO;
        MatC dOm = AO - Om * H;
        pack(dOm, H.trace(), dx);
    };
    State x;
    pack(frame.omega, frame.log_r, x);
    OdeTolerances tol{opts.abs_tol, opts.rel_tol, 0.0};
    MatC I = MatC::Identity(k, k);
    integrate_rk45(rhs, x, from_z, to_z, tol, [&](double, State& xs) {
        unpack(xs, W, lr);
        double drift = (W.adjoint() * W - I).norm();
        if (drift > opts.max_drift) return StepAction::Reject;
        frame.max_drift = std::max(frame.max_drift, drift);
        if (drift <= opts.reorth_tol) return StepAction::Continue;
        lr += orthonormalize(W);
        ++frame.reorthonormalizations;
        pack(W, lr, xs);
        return StepAction::Modified;
    });
    unpack(x, W, lr);
    frame.omega = W;
    frame.log_r = lr;
    return frame;
}

EvansValue evaluate_D(const EvansSystem& sys, const AnalyticBasisState& st, double match_z,
                      const DruryOptions& opts) {
    cd lambda = st.lambda;
    double L = sys.L();
    auto A = [&](double z) { return sys.matrix(z, lambda); };
    auto fp = initialize_at_infinity(sys.limit(Side::Plus, lambda), st.basis_plus, Side::Plus, L);
    auto fm = initialize_at_infinity(sys.limit(Side::Minus, lambda), st.basis_minus, Side::Minus, L);
    fp = drury_integrate(A, fp, L, match_z, opts);
    fm = drury_integrate(A, fm, -L, match_z, opts);
    const int N = sys.N();
    if (fp.k + fm.k != N) throw SplittingDegenerate("k+ + k- != N");
    MatC Wr(N, N);
    Wr << fp.omega, fm.omega;
    EvansValue v;
    cd det = Wr.determinant();
    v.log_D = fp.log_r + fm.log_r + (det == 0.0 ? cd(-INFINITY) : std::log(det));
    v.D = std::exp(v.log_D);
    v.max_drift = std::max(fp.max_drift, fm.max_drift);
    v.k_plus = fp.k;
    v.k_minus = fm.k;
    return v;
}

std::pair<int, int> reference_dimensions(const EvansSystem& sys) {
    int kp = spectral_split(sys.limit(Side::Plus, 1.0), Side::Plus).dim;
    int km = spectral_split(sys.limit(Side::Minus, 1.0), Side::Minus).dim;
    if (kp + km != sys.N())
        throw SplittingDegenerate("inconsistent splitting at lambda = 1: k+ = " + std::to_string(kp) +
                                  ", k- = " + std::to_string(km) + ", N = " + std::to_string(sys.N()));
    return {kp, km};
}

}  // namespace vevans
