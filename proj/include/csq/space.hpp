// space.hpp: truncated atom ⊗ field Hilbert space and the value types living on it

#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "csq/audit.hpp"
#include "csq/errors.hpp"

namespace csq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

// Two-level atom basis labels. Ground |−⟩ is index 0, excited |+⟩ index 1.
enum class AtomLevel : int { ground = 0, excited = 1 };

// Tensor-factor ordering tag. Only one ordering exists; the tag is carried
// so that serialized data and debug output can state it explicitly.
enum class FactorOrdering { atom_slow_field_fast };

class FockSpace {
public:
    // Field levels 0..n_fock-1; composite dimension 2·n_fock.
    static FockSpace make(std::size_t n_fock) {
        if (n_fock < 2) {
            throw InvalidArgument("FockSpace: n_fock must be >= 2, got " + std::to_string(n_fock));
        }
        return FockSpace(n_fock);
    }

    std::size_t n_fock() const noexcept { return n_fock_; }
    std::size_t composite_dim() const noexcept { return 2 * n_fock_; }
    Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(2 * n_fock_); }
    FactorOrdering ordering() const noexcept { return FactorOrdering::atom_slow_field_fast; }

    Eigen::Index index(AtomLevel atom, std::size_t n) const noexcept {
        return static_cast<Eigen::Index>(static_cast<std::size_t>(atom) * n_fock_ + n);
    }

    friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
    explicit FockSpace(std::size_t n) : n_fock_(n) {}
    std::size_t n_fock_;
};

inline FockSpace make_space(std::size_t n_fock) { return FockSpace::make(n_fock); }

namespace detail {

inline void require_same_space(const FockSpace& a, const FockSpace& b, const char* what) {
    if (!(a == b)) {
        throw DimensionMismatch(std::string(what) + ": operands live on spaces with n_fock " +
                                std::to_string(a.n_fock()) + " and " + std::to_string(b.n_fock()));
    }
}

inline void require_shape(const FockSpace& s, const Matrix& m, const char* what) {
    if (m.rows() != s.dim() || m.cols() != s.dim()) {
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", space needs " + std::to_string(s.dim()));
    }
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace detail

// Dense operator on the composite space.
class Operator {
public:
    Operator(FockSpace space, Matrix m) : space_(space), m_(std::move(m)) {
        detail::require_shape(space_, m_, "Operator");
    }

    const FockSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return m_; }
    cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    Operator adjoint() const { return {space_, m_.adjoint()}; }

    // ‖A − A†‖_max
    double hermiticity_defect() const { return detail::max_abs(m_ - m_.adjoint()); }

    friend Operator operator+(const Operator& a, const Operator& b) {
        detail::require_same_space(a.space_, b.space_, "Operator +");
        return {a.space_, a.m_ + b.m_};
    }
    friend Operator operator-(const Operator& a, const Operator& b) {
        detail::require_same_space(a.space_, b.space_, "Operator -");
        return {a.space_, a.m_ - b.m_};
    }
    friend Operator operator*(const Operator& a, const Operator& b) {
        detail::require_same_space(a.space_, b.space_, "Operator *");
        return {a.space_, a.m_ * b.m_};
    }
    friend Operator operator*(cplx s, const Operator& a) { return {a.space_, s * a.m_}; }
    friend Operator operator*(const Operator& a, cplx s) { return {a.space_, a.m_ * s}; }
    friend Operator operator-(const Operator& a) { return {a.space_, -a.m_}; }

private:
    FockSpace space_;
    Matrix m_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

class StateVector {
public:
    // Normalizes on construction; a zero vector is rejected.
    StateVector(FockSpace space, Vector amps) : space_(space), v_(std::move(amps)) {
        if (v_.size() != space_.dim()) {
            throw DimensionMismatch("StateVector: expected " + std::to_string(space_.dim()) +
                                    " amplitudes, got " + std::to_string(v_.size()));
        }
        const double nrm = v_.norm();
        if (!(nrm > 0.0)) throw InvalidArgument("StateVector: zero vector");
        v_ /= nrm;
    }

    const FockSpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return v_; }

private:
    FockSpace space_;
    Vector v_;
};

struct StateCheck {
    double hermiticity_defect = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;

    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10, double pos_tol = 1e-8) const {
        return hermiticity_defect < herm_tol && trace_error < trace_tol && min_eigenvalue >= -pos_tol;
    }
};

// Hermitian, unit-trace, positive state of the composite system. The
// constructor checks shape only; check() measures the physical invariants.
class DensityMatrix {
public:
    DensityMatrix(FockSpace space, Matrix m) : space_(space), m_(std::move(m)) {
        detail::require_shape(space_, m_, "DensityMatrix");
        if (auto* a = detail::auditor_slot().load()) a->on_state(*this);
    }

    static DensityMatrix pure(const StateVector& psi) {
        const Vector& v = psi.amplitudes();
        return {psi.space(), v * v.adjoint()};
    }

    const FockSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return m_; }

    cplx trace() const { return m_.trace(); }
    double hermiticity_defect() const { return detail::max_abs(m_ - m_.adjoint()); }

    Eigen::VectorXd eigenvalues() const {
        const Matrix h = 0.5 * (m_ + m_.adjoint());
        return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    }
    double min_eigenvalue() const { return eigenvalues().minCoeff(); }
    double purity() const { return (m_ * m_).trace().real(); }

    StateCheck check() const {
        return {hermiticity_defect(), std::abs(trace() - 1.0), min_eigenvalue()};
    }

    // Reduced field state, atom traced out (n_fock × n_fock).
    Matrix field_reduced() const {
        const auto n = static_cast<Eigen::Index>(space_.n_fock());
        return m_.topLeftCorner(n, n) + m_.bottomRightCorner(n, n);
    }

    // Reduced atom state, field traced out (2 × 2).
    Eigen::Matrix2cd atom_reduced() const {
        const auto n = static_cast<Eigen::Index>(space_.n_fock());
        Eigen::Matrix2cd out;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out(a, b) = m_.block(a * n, b * n, n, n).trace();
        return out;
    }

private:
    FockSpace space_;
    Matrix m_;
};

// ½‖ρ − σ‖₁ for Hermitian arguments.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    detail::require_same_space(a.space(), b.space(), "trace_distance");
    const Matrix diff = a.matrix() - b.matrix();
    const Matrix h = 0.5 * (diff + diff.adjoint());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    return 0.5 * ev.cwiseAbs().sum();
}

} // namespace csq
