#include "lpcvt/aniso.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>

namespace lpcvt {

AnisotropyTensor AnisotropyTensor::from_matrix(const Mat3& g) {
    AnisotropyTensor t;
    t.g11 = g(0, 0);
    t.g22 = g(1, 1);
    t.g33 = g(2, 2);
    t.g12 = 0.5 * (g(0, 1) + g(1, 0));
    t.g13 = 0.5 * (g(0, 2) + g(2, 0));
    t.g23 = 0.5 * (g(1, 2) + g(2, 1));
    return t;
}

Mat3 AnisotropyTensor::matrix() const {
    Mat3 g;
    g << g11, g12, g13,
         g12, g22, g23,
         g13, g23, g33;
    return g;
}

FrameMatrix spectral_factor(const AnisotropyTensor& g) {
    Eigen::SelfAdjointEigenSolver<Mat3> solver(g.matrix());
    if (solver.info() != Eigen::Success) {
        throw NotPositiveDefinite("eigendecomposition of anisotropy tensor failed");
    }
    // Descending eigenvalues; equal ones keep the solver's order so e.g.
    // the identity tensor maps to the identity frame.
    std::array<int, 3> perm = {0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return solver.eigenvalues()[a] > solver.eigenvalues()[b];
    });
    Vec3 lambda;
    Mat3 q;
    for (int i = 0; i < 3; ++i) {
        lambda[i] = solver.eigenvalues()[perm[i]];
        q.col(i) = solver.eigenvectors().col(perm[i]);
    }

    for (int i = 0; i < 3; ++i) {
        if (lambda[i] <= kEpsPositiveDefinite) {
            throw NotPositiveDefinite("anisotropy tensor eigenvalue " +
                                      std::to_string(lambda[i]) + " <= 1e-12");
        }
    }

    // Deterministic eigenvector signs: largest-magnitude component positive.
    for (int i = 0; i < 3; ++i) {
        int imax = 0;
        q.col(i).cwiseAbs().maxCoeff(&imax);
        if (q(imax, i) < 0) q.col(i) = -q.col(i);
    }
    // Keep det(M) > 0 (normalize_det requires it); flipping one eigenvector
    // leaves M^t M unchanged. The smallest-eigenvalue column is flipped so
    // the rule stays deterministic.
    if (q.determinant() < 0) q.col(2) = -q.col(2);

    FrameMatrix f;
    f.m = lambda.cwiseSqrt().asDiagonal() * q.transpose();
    f.raw_det = f.m.determinant();
    return f;
}

FrameMatrix normalize_det(const FrameMatrix& m) {
    const double det = m.m.determinant();
    if (det <= 1e-14) {
        throw DegenerateFrame("frame determinant " + std::to_string(det) +
                              " too small to normalize");
    }
    FrameMatrix out;
    out.m = m.m * std::pow(det, -1.0 / 3.0);
    out.raw_det = det;
    return out;
}

double quadratic_form(const AnisotropyTensor& g, const Vec3& v) {
    return v.dot(g.matrix() * v);
}

namespace {

bool tensor_is_identity(const AnisotropyTensor& g) {
    return g.g11 == 1 && g.g22 == 1 && g.g33 == 1 &&
           g.g12 == 0 && g.g13 == 0 && g.g23 == 0;
}

FrameMatrix normalized_frame(const AnisotropyTensor& g) {
    if (tensor_is_identity(g)) return FrameMatrix::identity();
    return normalize_det(spectral_factor(g));
}

}  // namespace

TensorField TensorField::constant(const AnisotropyTensor& g) {
    TensorField f;
    f.kind_ = Kind::Constant;
    f.positions_.push_back(Vec3::Zero());
    f.tensors_.push_back(g);
    f.frames_.push_back(normalized_frame(g));
    f.identity_ = tensor_is_identity(g);
    return f;
}

TensorField TensorField::nearest(std::vector<std::pair<Vec3, AnisotropyTensor>> samples) {
    if (samples.empty()) throw EmptyField("tensor field has no samples");
    TensorField f;
    f.kind_ = Kind::NearestLookup;
    f.identity_ = true;
    for (auto& [pos, tensor] : samples) {
        f.positions_.push_back(pos);
        f.tensors_.push_back(tensor);
        f.frames_.push_back(normalized_frame(tensor));
        f.identity_ = f.identity_ && tensor_is_identity(tensor);
    }
    return f;
}

const FrameMatrix& TensorField::eval(const Vec3& x) const {
    if (positions_.empty()) throw EmptyField("tensor field has no samples");
    if (kind_ == Kind::Constant) return frames_[0];
    std::size_t best = 0;
    double best_d2 = (x - positions_[0]).squaredNorm();
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        const double d2 = (x - positions_[i]).squaredNorm();
        if (d2 < best_d2) {  // strict: ties keep the lowest index
            best_d2 = d2;
            best = i;
        }
    }
    return frames_[best];
}

const FrameMatrix& field_eval(const TensorField& field, const Vec3& x) {
    return field.eval(x);
}

}  // namespace lpcvt
