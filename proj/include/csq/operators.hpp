// operators.hpp: elementary and composite operators on the atom ⊗ field space

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csq/space.hpp"

namespace csq {

// ---- lifting single-factor matrices -------------------------------------

// I_atom ⊗ F for an n_fock × n_fock field matrix F.
inline Operator field_operator(const FockSpace& s, const Matrix& f) {
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    if (f.rows() != n || f.cols() != n) throw DimensionMismatch("field_operator: field matrix has wrong shape");
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = f;
    m.bottomRightCorner(n, n) = f;
    return {s, std::move(m)};
}

// A ⊗ I_field for a 2 × 2 atom matrix A (rows/cols indexed by AtomLevel).
inline Operator atom_operator(const FockSpace& s, const Eigen::Matrix2cd& a) {
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (a(r, c) != cplx{}) m.block(r * n, c * n, n, n) = a(r, c) * Matrix::Identity(n, n);
    return {s, std::move(m)};
}

namespace detail {

inline Matrix field_lowering_matrix(Eigen::Index n) {
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline std::size_t padding_for(std::size_t n_fock) { return std::max<std::size_t>(10, n_fock / 4); }

// exp(G) for anti-Hermitian G through the eigendecomposition of the
// Hermitian matrix iG; the result is unitary to working precision.
inline Matrix expm_antihermitian(const Matrix& g) {
    const Matrix k = I * g;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.adjoint()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    Vector phase(lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j) phase(j) = std::exp(-I * lam(j));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

// Exponentiates a field generator in a padded space and keeps the
// n_fock × n_fock block; warns when the truncated vacuum column loses norm.
template <class MakeGenerator>
Matrix padded_field_unitary(std::size_t n_fock, MakeGenerator&& make_generator, const char* what) {
    const auto n = static_cast<Eigen::Index>(n_fock);
    const auto big = static_cast<Eigen::Index>(n_fock + padding_for(n_fock));
    const Matrix a = field_lowering_matrix(big);
    const Matrix u = expm_antihermitian(make_generator(a));
    const Matrix kept = u.topLeftCorner(n, n);
    const double lost = 1.0 - kept.col(0).squaredNorm();
    if (lost > 1e-10) {
        std::ostringstream msg;
        msg << what << ": n_fock=" << n_fock << " leaves " << lost << " of the vacuum image outside the space";
        warn(msg.str());
    }
    return kept;
}

} // namespace detail

// ---- elementary operators ------------------------------------------------

inline Operator identity(const FockSpace& s) { return {s, Matrix::Identity(s.dim(), s.dim())}; }

// I_atom ⊗ a with ⟨n−1|a|n⟩ = √n
inline Operator field_annihilation(const FockSpace& s) {
    return field_operator(s, detail::field_lowering_matrix(static_cast<Eigen::Index>(s.n_fock())));
}

inline Operator field_creation(const FockSpace& s) { return field_annihilation(s).adjoint(); }

inline Operator number_operator(const FockSpace& s) {
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) d(k, k) = static_cast<double>(k);
    return field_operator(s, d);
}

// σ₋ ⊗ I_field: σ₋|+⟩ = |−⟩
inline Operator atom_lowering(const FockSpace& s) {
    Eigen::Matrix2cd sm = Eigen::Matrix2cd::Zero();
    sm(static_cast<int>(AtomLevel::ground), static_cast<int>(AtomLevel::excited)) = 1.0;
    return atom_operator(s, sm);
}

inline Operator atom_raising(const FockSpace& s) { return atom_lowering(s).adjoint(); }

// σ_z = [σ₊, σ₋]
inline Operator atom_inversion(const FockSpace& s) { return commutator(atom_raising(s), atom_lowering(s)); }

// I_atom ⊗ exp(α a† − α* a). Recommended: |α|² + 6|α| + 10 ≤ n_fock.
inline Operator displacement(const FockSpace& s, cplx alpha) {
    const double m = std::abs(alpha);
    if (m * m + 6.0 * m + 10.0 > static_cast<double>(s.n_fock())) {
        std::ostringstream msg;
        msg << "displacement: |alpha|=" << m << " is under-resolved at n_fock=" << s.n_fock();
        warn(msg.str());
    }
    if (alpha == cplx{}) return identity(s);
    const Matrix f = detail::padded_field_unitary(
        s.n_fock(), [&](const Matrix& a) -> Matrix { return alpha * a.adjoint() - std::conj(alpha) * a; },
        "displacement");
    return field_operator(s, f);
}

// I_atom ⊗ exp[(r/2)(a†² − a²)]. Recommended: |r| ≤ 3.
inline Operator squeeze(const FockSpace& s, double r) {
    if (std::abs(r) > 3.0) {
        std::ostringstream msg;
        msg << "squeeze: |r|=" << std::abs(r) << " exceeds the resolvable range";
        warn(msg.str());
    }
    if (r == 0.0) return identity(s);
    const Matrix f = detail::padded_field_unitary(
        s.n_fock(),
        [&](const Matrix& a) -> Matrix {
            const Matrix ad = a.adjoint();
            return (0.5 * r) * (ad * ad - a * a);
        },
        "squeeze");
    return field_operator(s, f);
}

// Symmetrized Susskind–Glogower cosine [(n+1)^{-1/2} a + a† (n+1)^{-1/2}] / 2.
inline Operator phase_cosine(const FockSpace& s) {
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    const Matrix a = detail::field_lowering_matrix(n);
    Matrix inv_sqrt = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) inv_sqrt(k, k) = 1.0 / std::sqrt(static_cast<double>(k + 1));
    const Matrix e = inv_sqrt * a;
    return field_operator(s, 0.5 * (e + e.adjoint()));
}

// X_θ = (a e^{−iθ} + a† e^{iθ}) / 2
inline Operator quadrature(const FockSpace& s, double theta) {
    const Operator a = field_annihilation(s);
    return cplx{0.5} * (std::exp(-I * theta) * a + std::exp(I * theta) * a.adjoint());
}

// ---- states --------------------------------------------------------------

inline StateVector basis_state(const FockSpace& s, AtomLevel atom, std::size_t n) {
    if (n >= s.n_fock()) throw InvalidArgument("basis_state: Fock level outside the space");
    Vector v = Vector::Zero(s.dim());
    v(s.index(atom, n)) = 1.0;
    return {s, std::move(v)};
}

// Product state (atom amplitudes) ⊗ (field amplitudes).
inline StateVector product_state(const FockSpace& s, const Eigen::Vector2cd& atom, const Vector& field) {
    if (field.size() != static_cast<Eigen::Index>(s.n_fock()))
        throw DimensionMismatch("product_state: field vector has wrong length");
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    Vector v(2 * n);
    v.head(n) = atom(0) * field;
    v.tail(n) = atom(1) * field;
    return {s, std::move(v)};
}

inline StateVector apply(const Operator& op, const StateVector& psi) {
    detail::require_same_space(op.space(), psi.space(), "apply");
    return {psi.space(), op.matrix() * psi.amplitudes()};
}

// D(α)|0⟩ ⊗ |atom⟩
inline StateVector coherent_state(const FockSpace& s, cplx alpha, AtomLevel atom = AtomLevel::ground) {
    return apply(displacement(s, alpha), basis_state(s, atom, 0));
}

// ---- expectation values --------------------------------------------------

inline cplx expectation(const Operator& a, const DensityMatrix& rho) {
    detail::require_same_space(a.space(), rho.space(), "expectation");
    // trace(A ρ) without forming the product
    return (a.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

inline cplx expectation(const Operator& a, const StateVector& psi) {
    detail::require_same_space(a.space(), psi.space(), "expectation");
    return psi.amplitudes().dot(a.matrix() * psi.amplitudes());
}

} // namespace csq
