#ifndef KWSFCM_KERNEL_HPP
#define KWSFCM_KERNEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace kwsfcm {

enum class KernelKind { gaussian_rbf, polynomial };

/// Scalar kernel parameters. Pixels are 1-D gray intensities, so only the
/// scalar forms are needed; color images run one channel at a time.
struct KernelParams {
    KernelKind kind = KernelKind::gaussian_rbf;
    double sigma = 150.0;  // bandwidth of the RBF
    double a = 2.0;        // inner exponent
    double b = 1.0;        // outer exponent
    int p = 2;             // polynomial degree

    void validate() const {
        if (sigma <= 0.0) throw std::invalid_argument("kernel sigma must be > 0");
        if (a <= 0.0) throw std::invalid_argument("kernel exponent a must be > 0");
        if (b < 1.0 || b > 2.0) throw std::invalid_argument("kernel exponent b must be in [1,2]");
        if (p < 1) throw std::invalid_argument("kernel degree p must be >= 1");
    }
};

/// K(x,y). The RBF form is exp(-(|x-y|^a)^b / sigma^2): bounded in (0,1],
/// K(x,x)=1, and 1-K is a valid nonnegative distance. The polynomial form
/// (x*y+1)^p has no such guarantee and is for study only.
inline double kernel_eval(double x, double y, const KernelParams& params) {
    switch (params.kind) {
        case KernelKind::gaussian_rbf: {
            const double d = std::pow(std::abs(x - y), params.a);
            return std::exp(-std::pow(d, params.b) / (params.sigma * params.sigma));
        }
        case KernelKind::polynomial:
            return std::pow(x * y + 1.0, static_cast<double>(params.p));
    }
    return 0.0;  // unreachable
}

inline KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "gaussian_rbf") return KernelKind::gaussian_rbf;
    if (name == "polynomial") return KernelKind::polynomial;
    throw std::invalid_argument("unknown kernel kind '" + name + "'");
}

inline const char* to_string(KernelKind kind) {
    return kind == KernelKind::gaussian_rbf ? "gaussian_rbf" : "polynomial";
}

}  // namespace kwsfcm

#endif
