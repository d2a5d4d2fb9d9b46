#ifndef LPCVT_ANISO_HPP
#define LPCVT_ANISO_HPP

#include <Eigen/Dense>
#include <vector>

#include "lpcvt/errors.hpp"

namespace lpcvt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Symmetric positive-definite anisotropy tensor. Only the six unique
/// entries are stored, so symmetry holds exactly.
struct AnisotropyTensor {
    double g11 = 1, g12 = 0, g13 = 0, g22 = 1, g23 = 0, g33 = 1;

    static AnisotropyTensor identity() { return {}; }

    /// Builds from a symmetric matrix; off-diagonal pairs are averaged.
    static AnisotropyTensor from_matrix(const Mat3& g);

    Mat3 matrix() const;
};

/// Square factor M of a tensor G = M^t M, with det(M) = 1 after
/// normalization. raw_det records the determinant of the unnormalized
/// factor so callers can reweight if they want the original scale back.
struct FrameMatrix {
    Mat3 m = Mat3::Identity();
    double raw_det = 1.0;

    static FrameMatrix identity() { return {}; }
};

/// Eigenvalues below this are treated as a violation of positive
/// definiteness.
inline constexpr double kEpsPositiveDefinite = 1e-12;

/// Factors g = M^t M through the spectral decomposition g = Q L Q^t,
/// M = sqrt(L) Q^t. Eigenvalues are sorted descending and eigenvector
/// signs are fixed (largest-magnitude component positive) so the result
/// is deterministic. Throws NotPositiveDefinite if any eigenvalue is
/// <= kEpsPositiveDefinite. The result is NOT det-normalized.
FrameMatrix spectral_factor(const AnisotropyTensor& g);

/// Rescales m to unit determinant: m' = det(m)^(-1/3) m. Requires
/// det(m) > 1e-14, else throws DegenerateFrame. raw_det of the result is
/// the input determinant.
FrameMatrix normalize_det(const FrameMatrix& m);

/// v^t g v.
double quadratic_form(const AnisotropyTensor& g, const Vec3& v);

/// Piecewise-constant tensor field: either a single constant tensor or a
/// set of samples queried by nearest position (ties go to the lowest
/// sample index). Frames are factored and det-normalized on construction.
class TensorField {
public:
    enum class Kind { Constant, NearestLookup };

    static TensorField constant(const AnisotropyTensor& g);
    static TensorField nearest(std::vector<std::pair<Vec3, AnisotropyTensor>> samples);

    Kind kind() const { return kind_; }
    std::size_t sample_count() const { return positions_.size(); }
    const AnisotropyTensor& tensor(std::size_t i) const { return tensors_[i]; }

    /// Frame at x (det-normalized). Throws EmptyField on an empty field.
    const FrameMatrix& eval(const Vec3& x) const;

    bool is_identity() const { return identity_; }

private:
    TensorField() = default;
    Kind kind_ = Kind::Constant;
    bool identity_ = true;
    std::vector<Vec3> positions_;
    std::vector<AnisotropyTensor> tensors_;
    std::vector<FrameMatrix> frames_;
};

/// Free-function form of TensorField::eval.
const FrameMatrix& field_eval(const TensorField& field, const Vec3& x);

}  // namespace lpcvt

#endif
