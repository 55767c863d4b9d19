#ifndef PUAL_LINALG_HPP
#define PUAL_LINALG_HPP

#include "pual/common.hpp"
#include "pual/error.hpp"
#include "pual/hyperparams.hpp"

#include <string>

namespace pual {

/// LDLT of a symmetric matrix whose leading `ridge_block` x `ridge_block` part
/// receives jitter 1e-10 * trace(block) / block once if the first factorization
/// fails or its reciprocal condition estimate is below 1e-12.
class SymmetricSolver {
  public:
    SymmetricSolver() = default;

    SymmetricSolver(Matrix A, Eigen::Index ridge_block, ErrorKind on_failure) {
        A = 0.5 * (A + A.transpose()).eval();
        if (!A.allFinite()) {
            throw Error(on_failure, "system matrix has non-finite entries");
        }
        ldlt_.compute(A);
        if (usable()) {
            return;
        }
        const Eigen::Index block = ridge_block > 0 ? ridge_block : A.rows();
        const double jitter = 1e-10 * A.topLeftCorner(block, block).trace() / static_cast<double>(block);
        A.topLeftCorner(block, block).diagonal().array() += jitter;
        jittered_ = true;
        ldlt_.compute(A);
        if (!usable()) {
            throw Error(on_failure, "condition estimate " + std::to_string(ldlt_.rcond()) +
                                        " below 1e-12 after jitter retry");
        }
    }

    [[nodiscard]] Vector solve(const Vector &rhs) const { return ldlt_.solve(rhs); }
    [[nodiscard]] Matrix solve(const Matrix &rhs) const { return ldlt_.solve(rhs); }
    [[nodiscard]] double rcond() const { return ldlt_.rcond(); }
    [[nodiscard]] bool jittered() const noexcept { return jittered_; }

  private:
    [[nodiscard]] bool usable() const {
        return ldlt_.info() == Eigen::Success && ldlt_.rcond() >= singular_rcond;
    }

    Eigen::LDLT<Matrix> ldlt_;
    bool jittered_{false};
};

}  // namespace pual

#endif  // PUAL_LINALG_HPP
