// model.hpp: Hamiltonians and Lindblad superoperators for the driven atom–cavity system

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <lapacke.h>

#include "csq/operators.hpp"

namespace csq {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Rates in units of a reference rate (conventionally g = 1), ħ = 1.
struct SystemParams {
    double g = 1.0;      // atom–cavity coupling
    double omega = 0.0;  // Rabi frequency of the classical drive on the atom
    double kappa = 0.0;  // cavity field damping
    double gamma = 0.0;  // atomic free-space decay
    std::size_t n_fock = 20;

    void validate() const {
        if (!(g > 0.0)) throw InvalidArgument("SystemParams: g must be > 0");
        if (!(omega >= 0.0)) throw InvalidArgument("SystemParams: omega must be >= 0");
        if (!(kappa >= 0.0)) throw InvalidArgument("SystemParams: kappa must be >= 0");
        if (!(gamma >= 0.0)) throw InvalidArgument("SystemParams: gamma must be >= 0");
        if (n_fock < 2) throw InvalidArgument("SystemParams: n_fock must be >= 2");
    }

    // 2Ωκ/g²
    double drive_ratio() const { return 2.0 * omega * kappa / (g * g); }
    // displaced-frame amplitude α = Ω/g (real, positive)
    double alpha() const { return omega / g; }
    // strength of the effective cavity drive in the displaced frame
    double effective_drive() const { return omega * kappa / g; }

    FockSpace space() const { return make_space(n_fock); }

    SystemParams with_n_fock(std::size_t n) const {
        SystemParams p = *this;
        p.n_fock = n;
        return p;
    }
};

enum class Frame { interaction, displaced };

inline const char* to_string(Frame f) { return f == Frame::interaction ? "interaction" : "displaced"; }

// i g (a†σ₋ − aσ₊)
inline Operator coupling_hamiltonian(const SystemParams& p) {
    const FockSpace s = p.space();
    const Operator a = field_annihilation(s);
    const Operator sm = atom_lowering(s);
    return cplx{0.0, p.g} * (a.adjoint() * sm - a * sm.adjoint());
}

// interaction frame: i g (a†σ₋ − aσ₊) + i Ω (σ₊ − σ₋)
// displaced frame:   i g (a†σ₋ − aσ₊) + i Ω(κ/g) (a − a†)
inline Operator hamiltonian(const SystemParams& p, Frame frame) {
    p.validate();
    const FockSpace s = p.space();
    Operator h = coupling_hamiltonian(p);
    if (frame == Frame::interaction) {
        const Operator sm = atom_lowering(s);
        return h + cplx{0.0, p.omega} * (sm.adjoint() - sm);
    }
    const Operator a = field_annihilation(s);
    return h + cplx{0.0, p.effective_drive()} * (a - a.adjoint());
}

struct CollapseChannel {
    Operator op;  // jump operator c, entering as c ρ c† − ½{c†c, ρ}
    std::string label;
};

// √(2κ) a and √γ σ₋; identical in both frames.
inline std::vector<CollapseChannel> collapse_channels(const SystemParams& p) {
    const FockSpace s = p.space();
    std::vector<CollapseChannel> out;
    if (p.kappa > 0.0) out.push_back({cplx{std::sqrt(2.0 * p.kappa)} * field_annihilation(s), "cavity"});
    if (p.gamma > 0.0) out.push_back({cplx{std::sqrt(p.gamma)} * atom_lowering(s), "atom"});
    return out;
}

namespace detail {

inline SparseMatrix to_sparse(const Matrix& m, double tol = 0.0) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (std::abs(m(r, c)) > tol) t.emplace_back(static_cast<int>(r), static_cast<int>(c), m(r, c));
    SparseMatrix out(m.rows(), m.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// Appends coeff · (A ⊗ B) into a triplet list.
inline void add_kron(std::vector<Eigen::Triplet<cplx>>& t, cplx coeff, const SparseMatrix& a, const SparseMatrix& b) {
    const auto nb_r = static_cast<int>(b.rows());
    const auto nb_c = static_cast<int>(b.cols());
    for (int ja = 0; ja < a.outerSize(); ++ja)
        for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia)
            for (int jb = 0; jb < b.outerSize(); ++jb)
                for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib)
                    t.emplace_back(static_cast<int>(ia.row()) * nb_r + static_cast<int>(ib.row()),
                                   ja * nb_c + jb, coeff * ia.value() * ib.value());
}

} // namespace detail

// Superoperator on column-stacked density matrices: vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
class Liouvillian {
public:
    Liouvillian(FockSpace space, SparseMatrix m, Frame frame, bool dissipative)
        : space_(space), m_(std::move(m)), frame_(frame), dissipative_(dissipative) {
        const auto d2 = space_.dim() * space_.dim();
        if (m_.rows() != d2 || m_.cols() != d2) throw DimensionMismatch("Liouvillian: wrong superoperator shape");
        m_.makeCompressed();
        if (auto* a = detail::auditor_slot().load()) a->on_liouvillian(*this);
    }

    const FockSpace& space() const noexcept { return space_; }
    const SparseMatrix& matrix() const noexcept { return m_; }
    Frame frame() const noexcept { return frame_; }
    bool dissipative() const noexcept { return dissipative_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

    Matrix apply(const Matrix& rho) const {
        const Eigen::Index d = space_.dim();
        Vector out = m_ * Eigen::Map<const Vector>(rho.data(), d * d);
        return Eigen::Map<Matrix>(out.data(), d, d);
    }

    // max_j |Σ_i L[(i,i), j]|: how far vec(I)† L is from zero
    double trace_annihilation_defect() const {
        const Eigen::Index d = space_.dim();
        Vector row = Vector::Zero(dim());
        for (int j = 0; j < m_.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(m_, j); it; ++it)
                if (it.row() % (d + 1) == 0) row(j) += it.value();
        return row.cwiseAbs().maxCoeff();
    }

    // Largest real part of the spectrum by full dense diagonalization;
    // intended for small truncations (superoperator dimension up to a few thousand).
    double spectral_abscissa() const {
        Matrix dense(m_);
        const auto n = static_cast<lapack_int>(dense.rows());
        Vector w(n);
        const lapack_int info =
            LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(dense.data()), n,
                          reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
        if (info != 0) throw Error("Liouvillian: zgeev failed with info " + std::to_string(info));
        return w.real().maxCoeff();
    }

    // Frobenius norm of the superoperator matrix
    double norm() const { return m_.norm(); }

private:
    FockSpace space_;
    SparseMatrix m_;
    Frame frame_;
    bool dissipative_;
};

// L(ρ) = −i[H, ρ] + Σ_c (c ρ c† − ½{c†c, ρ})
inline Liouvillian liouvillian(const Operator& h, const std::vector<CollapseChannel>& channels, Frame frame) {
    const FockSpace s = h.space();
    const Eigen::Index d = s.dim();
    const SparseMatrix id = detail::to_sparse(Matrix::Identity(d, d));
    std::vector<Eigen::Triplet<cplx>> t;
    const SparseMatrix hs = detail::to_sparse(h.matrix());
    const SparseMatrix hts = detail::to_sparse(h.matrix().transpose());
    detail::add_kron(t, -I, id, hs);
    detail::add_kron(t, I, hts, id);
    for (const auto& ch : channels) {
        detail::require_same_space(s, ch.op.space(), "liouvillian");
        const Matrix& c = ch.op.matrix();
        const Matrix cdc = c.adjoint() * c;
        detail::add_kron(t, 1.0, detail::to_sparse(c.conjugate()), detail::to_sparse(c));
        detail::add_kron(t, -0.5, id, detail::to_sparse(cdc));
        detail::add_kron(t, -0.5, detail::to_sparse(cdc.transpose()), id);
    }
    SparseMatrix m(d * d, d * d);
    m.setFromTriplets(t.begin(), t.end());
    m.prune(cplx{0.0});
    return {s, std::move(m), frame, !channels.empty()};
}

inline Liouvillian liouvillian(const SystemParams& p, Frame frame) {
    return liouvillian(hamiltonian(p, frame), collapse_channels(p), frame);
}

} // namespace csq
